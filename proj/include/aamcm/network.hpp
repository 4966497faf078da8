#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aamcm/geo.hpp"
#include "aamcm/hazards.hpp"

namespace aamcm::network {

using geo::EnuPoint;
using geo::GeoPoint;
using hazards::HazardRegion;

inline constexpr std::size_t kLaneCount = 8;
/// Spacing of hazard samples along a route polyline.
inline constexpr double kRiskSampleSpacing = 100.0;

struct Vertiport {
  int id = 0;
  GeoPoint location;
  std::string name;

  bool operator==(const Vertiport&) const = default;
};

struct NetworkNode {
  int id = 0;
  GeoPoint location;

  bool operator==(const NetworkNode&) const = default;
};

struct Edge {
  int a = 0;
  int b = 0;
  double length = 0.0;  // meters, horizontal ENU distance

  bool operator==(const Edge&) const = default;
};

struct Route {
  std::vector<EnuPoint> waypoints;
  double total_length = 0.0;
  double risk = 0.0;
  /// Graph vertices visited, when the route came from the network.
  std::vector<int> vertex_ids;
  std::optional<int> vertiport_id;

  bool empty() const noexcept { return waypoints.empty(); }
};

/// Immutable airspace graph, vertex lists kept sorted by id. Vertiports and
/// route nodes share one id space (ids must be disjoint); vertiports are only
/// ever path endpoints.
class CorridorNetwork {
 public:
  CorridorNetwork(std::vector<Vertiport> vertiports, std::vector<NetworkNode> nodes,
                  std::vector<std::pair<int, int>> edges,
                  std::array<double, kLaneCount> lanes_ft);

  const std::vector<Vertiport>& vertiports() const noexcept { return vertiports_; }
  const std::vector<NetworkNode>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::array<double, kLaneCount>& lanes_ft() const noexcept { return lanes_ft_; }
  const geo::Projection& projection() const noexcept { return projection_; }

  bool contains(int id) const { return index_.contains(id); }
  bool is_vertiport(int id) const;
  const Vertiport& vertiport(int id) const;
  /// ENU position of any vertex.
  const EnuPoint& position(int id) const;
  /// Neighbors of a vertex with edge lengths, sorted by neighbor id.
  const std::vector<std::pair<int, double>>& neighbors(int id) const;

  bool operator==(const CorridorNetwork& other) const {
    return vertiports_ == other.vertiports_ && nodes_ == other.nodes_ && edges_ == other.edges_ &&
           lanes_ft_ == other.lanes_ft_;
  }

 private:
  std::size_t slot(int id) const;

  std::vector<Vertiport> vertiports_;
  std::vector<NetworkNode> nodes_;
  std::vector<Edge> edges_;
  std::array<double, kLaneCount> lanes_ft_;
  geo::Projection projection_;
  std::unordered_map<int, std::size_t> index_;
  std::vector<EnuPoint> positions_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
  std::vector<bool> vertiport_flag_;
};

/// Eight lanes evenly spanning 1,000-5,000 ft AGL.
std::array<double, kLaneCount> default_lanes_ft();

/// Route node closest to `p` horizontally; ties go to the lowest id.
const NetworkNode& nearest_node(const CorridorNetwork& net, const EnuPoint& p);

/// Single-source shortest paths by edge length.
class ShortestPathTree {
 public:
  ShortestPathTree(const CorridorNetwork& net, int source);

  int source() const noexcept { return source_; }
  bool reachable(int id) const;
  double distance(int id) const;
  /// Vertex sequence from the source to `id`; throws NoPath if unreachable.
  std::vector<int> path_to(int id) const;

 private:
  const CorridorNetwork* net_;
  int source_;
  std::unordered_map<int, double> dist_;
  std::unordered_map<int, int> prev_;
};

struct PathResult {
  Route route;
  double length = 0.0;  // R_rho
  double risk = 0.0;    // R_PH
};

PathResult dijkstra(const CorridorNetwork& net, int from, int vertiport_id,
                    std::span<const HazardRegion> hazards);

/// Builds a Route through the given vertices and scores it against `hazards`.
Route make_route(const CorridorNetwork& net, std::span<const int> vertices,
                 std::span<const HazardRegion> hazards);
/// Direct two-point route.
Route straight_route(const EnuPoint& from, const EnuPoint& to, std::span<const HazardRegion> hazards);

/// Max field intensity sampled at most every 100 m along the polyline,
/// segment endpoints included.
double route_risk(std::span<const EnuPoint> waypoints, std::span<const HazardRegion> hazards);
double route_risk(const Route& route, std::span<const HazardRegion> hazards);

CorridorNetwork parse_network(std::istream& in);
void write_network(const CorridorNetwork& net, std::ostream& out);
CorridorNetwork load_network(const std::filesystem::path& path);
void save_network(const CorridorNetwork& net, const std::filesystem::path& path);

}  // namespace aamcm::network
