#include "aamcm/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "aamcm/error.hpp"
#include "aamcm/text.hpp"

namespace aamcm::network {

namespace {

geo::GeoPoint centroid(const std::vector<Vertiport>& vps, const std::vector<NetworkNode>& nodes) {
  const std::size_t n = vps.size() + nodes.size();
  if (n == 0) throw Error(Errc::EmptyNetwork, "network has no vertices");
  double lat = 0.0, lon = 0.0;
  for (const auto& v : vps) {
    geo::validate(v.location);
    lat += v.location.latitude;
    lon += v.location.longitude;
  }
  for (const auto& nd : nodes) {
    geo::validate(nd.location);
    lat += nd.location.latitude;
    lon += nd.location.longitude;
  }
  return {lat / static_cast<double>(n), lon / static_cast<double>(n), 0.0};
}

}  // namespace

std::array<double, kLaneCount> default_lanes_ft() {
  std::array<double, kLaneCount> lanes{};
  for (std::size_t i = 0; i < kLaneCount; ++i) {
    lanes[i] = 1000.0 + 4000.0 * static_cast<double>(i) / static_cast<double>(kLaneCount - 1);
  }
  return lanes;
}

namespace {

template <typename T>
std::vector<T> sorted_by_id(std::vector<T> v) {
  std::stable_sort(v.begin(), v.end(), [](const T& x, const T& y) { return x.id < y.id; });
  return v;
}

}  // namespace

CorridorNetwork::CorridorNetwork(std::vector<Vertiport> vertiports, std::vector<NetworkNode> nodes,
                                 std::vector<std::pair<int, int>> edges,
                                 std::array<double, kLaneCount> lanes_ft)
    : vertiports_(sorted_by_id(std::move(vertiports))),
      nodes_(sorted_by_id(std::move(nodes))),
      lanes_ft_(lanes_ft),
      projection_(centroid(vertiports_, nodes_)) {
  auto add_vertex = [&](int id, const GeoPoint& loc, bool is_vp) {
    if (!index_.emplace(id, positions_.size()).second) {
      throw Error(Errc::ParseError, "duplicate vertex id " + std::to_string(id));
    }
    positions_.push_back(geo::to_enu(loc, projection_));
    vertiport_flag_.push_back(is_vp);
  };
  for (const auto& v : vertiports_) add_vertex(v.id, v.location, true);
  for (const auto& nd : nodes_) add_vertex(nd.id, nd.location, false);
  adjacency_.resize(positions_.size());

  std::unordered_set<long long> seen;
  edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    for (int id : {a, b}) {
      if (!contains(id)) {
        throw Error(Errc::ParseError, "edge references unknown vertex id " + std::to_string(id));
      }
    }
    if (a == b) throw Error(Errc::ParseError, "self-loop on vertex " + std::to_string(a));
    const long long key = (static_cast<long long>(std::min(a, b)) << 32) ^
                          static_cast<unsigned int>(std::max(a, b));
    if (!seen.insert(key).second) {
      throw Error(Errc::ParseError,
                  "duplicate edge " + std::to_string(a) + "-" + std::to_string(b));
    }
    const double len = geo::horizontal_distance(position(a), position(b));
    edges_.push_back({a, b, len});
    adjacency_[slot(a)].emplace_back(b, len);
    adjacency_[slot(b)].emplace_back(a, len);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  for (double ft : lanes_ft_) {
    if (!(ft > 0.0) || !std::isfinite(ft)) throw Error(Errc::ParseError, "lane altitude must be positive");
  }
}

std::size_t CorridorNetwork::slot(int id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw Error(Errc::NoPath, "unknown vertex id " + std::to_string(id));
  return it->second;
}

bool CorridorNetwork::is_vertiport(int id) const {
  const auto it = index_.find(id);
  return it != index_.end() && vertiport_flag_[it->second];
}

const Vertiport& CorridorNetwork::vertiport(int id) const {
  const std::size_t s = slot(id);
  if (!vertiport_flag_[s]) throw Error(Errc::NoPath, "vertex " + std::to_string(id) + " is not a vertiport");
  // Vertiports occupy the first slots, in declaration order.
  return vertiports_[s];
}

const EnuPoint& CorridorNetwork::position(int id) const { return positions_[slot(id)]; }

const std::vector<std::pair<int, double>>& CorridorNetwork::neighbors(int id) const {
  return adjacency_[slot(id)];
}

const NetworkNode& nearest_node(const CorridorNetwork& net, const EnuPoint& p) {
  if (net.nodes().empty()) throw Error(Errc::EmptyNetwork, "network has no route nodes");
  const NetworkNode* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& nd : net.nodes()) {
    const double d = geo::horizontal_distance(net.position(nd.id), p);
    if (d < best_d || (d == best_d && nd.id < best->id)) {
      best = &nd;
      best_d = d;
    }
  }
  return *best;
}

ShortestPathTree::ShortestPathTree(const CorridorNetwork& net, int source)
    : net_(&net), source_(source) {
  if (!net.contains(source)) throw Error(Errc::NoPath, "unknown source vertex " + std::to_string(source));
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist_[source] = 0.0;
  open.emplace(0.0, source);
  std::unordered_set<int> done;
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (!done.insert(u).second) continue;
    // Vertiports terminate paths; never fly through one.
    if (u != source && net.is_vertiport(u)) continue;
    for (const auto& [v, len] : net.neighbors(u)) {
      const double nd = d + len;
      const auto it = dist_.find(v);
      if (it == dist_.end() || nd < it->second) {
        dist_[v] = nd;
        prev_[v] = u;
        open.emplace(nd, v);
      }
    }
  }
}

bool ShortestPathTree::reachable(int id) const { return dist_.contains(id); }

double ShortestPathTree::distance(int id) const {
  const auto it = dist_.find(id);
  return it == dist_.end() ? std::numeric_limits<double>::infinity() : it->second;
}

std::vector<int> ShortestPathTree::path_to(int id) const {
  if (!reachable(id)) {
    throw Error(Errc::NoPath, "no path from " + std::to_string(source_) + " to " + std::to_string(id));
  }
  std::vector<int> path{id};
  while (path.back() != source_) path.push_back(prev_.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

Route make_route(const CorridorNetwork& net, std::span<const int> vertices,
                 std::span<const HazardRegion> hazards) {
  Route r;
  r.vertex_ids.assign(vertices.begin(), vertices.end());
  for (int id : vertices) r.waypoints.push_back(net.position(id));
  for (std::size_t i = 1; i < r.waypoints.size(); ++i) {
    r.total_length += geo::horizontal_distance(r.waypoints[i - 1], r.waypoints[i]);
  }
  if (!vertices.empty() && net.is_vertiport(vertices.back())) r.vertiport_id = vertices.back();
  r.risk = r.waypoints.size() >= 2 ? route_risk(r, hazards) : 0.0;
  return r;
}

Route straight_route(const EnuPoint& from, const EnuPoint& to, std::span<const HazardRegion> hazards) {
  Route r;
  r.waypoints = {from, to};
  r.total_length = geo::horizontal_distance(from, to);
  r.risk = route_risk(r, hazards);
  return r;
}

PathResult dijkstra(const CorridorNetwork& net, int from, int vertiport_id,
                    std::span<const HazardRegion> hazards) {
  if (!net.is_vertiport(vertiport_id)) {
    throw Error(Errc::NoPath, "target " + std::to_string(vertiport_id) + " is not a vertiport");
  }
  const ShortestPathTree tree(net, from);
  const auto path = tree.path_to(vertiport_id);
  PathResult out;
  out.route = make_route(net, path, hazards);
  out.length = tree.distance(vertiport_id);
  out.risk = out.route.risk;
  return out;
}

double route_risk(std::span<const EnuPoint> waypoints, std::span<const HazardRegion> hazards) {
  if (waypoints.size() < 2) throw Error(Errc::InvalidRoute, "route needs at least two waypoints");
  if (hazards.empty()) return 0.0;
  double risk = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const auto& a = waypoints[i - 1];
    const auto& b = waypoints[i];
    const double len = geo::horizontal_distance(a, b);
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / kRiskSampleSpacing)));
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      const EnuPoint p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
      risk = std::max(risk, hazards::max_intensity(hazards, p));
    }
  }
  return risk;
}

double route_risk(const Route& route, std::span<const HazardRegion> hazards) {
  return route_risk(std::span<const EnuPoint>(route.waypoints), hazards);
}

// ---------------------------------------------------------------------------
// File format

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + what);
}

GeoPoint parse_location(const std::vector<std::string_view>& f, std::size_t line) {
  GeoPoint p;
  const char* names[] = {"lat", "lon", "alt"};
  double* dst[] = {&p.latitude, &p.longitude, &p.altitude};
  for (int i = 0; i < 3; ++i) {
    const auto v = text::parse_double(f[static_cast<std::size_t>(i) + 1]);
    if (!v) parse_fail(line, std::string("invalid ") + names[i] + " '" + std::string(f[i + 1]) + "'");
    *dst[i] = *v;
  }
  try {
    geo::validate(p);
  } catch (const Error& e) {
    parse_fail(line, e.what());
  }
  return p;
}

}  // namespace

CorridorNetwork parse_network(std::istream& in) {
  std::vector<Vertiport> vps;
  std::vector<NetworkNode> nodes;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> lanes;
  std::unordered_set<int> ids;
  std::string section;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto s = text::strip_comment(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') parse_fail(line, "unterminated section header");
      section = std::string(s.substr(1, s.size() - 2));
      if (section != "vertiports" && section != "nodes" && section != "edges" && section != "lanes") {
        parse_fail(line, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto f = text::split(s, ',');
    auto parse_id = [&](std::string_view v, const char* field) {
      const auto id = text::parse_int(v);
      if (!id) parse_fail(line, std::string("invalid ") + field + " '" + std::string(v) + "'");
      return static_cast<int>(*id);
    };
    if (section == "vertiports" || section == "nodes") {
      if (f.size() < 4 || f.size() > (section == "vertiports" ? 5u : 4u)) {
        parse_fail(line, "expected id,lat,lon,alt");
      }
      const int id = parse_id(f[0], "id");
      if (!ids.insert(id).second) {
        parse_fail(line, "duplicate " + std::string(section == "vertiports" ? "vertiport" : "node") +
                             " id " + std::to_string(id));
      }
      const auto loc = parse_location(f, line);
      if (section == "vertiports") {
        vps.push_back({id, loc, f.size() == 5 ? std::string(f[4]) : std::string()});
      } else {
        nodes.push_back({id, loc});
      }
    } else if (section == "edges") {
      if (f.size() != 2) parse_fail(line, "expected id_a,id_b");
      edges.emplace_back(parse_id(f[0], "id_a"), parse_id(f[1], "id_b"));
    } else if (section == "lanes") {
      for (const auto& v : f) {
        const auto alt = text::parse_double(v);
        if (!alt) parse_fail(line, "invalid alt_ft '" + std::string(v) + "'");
        lanes.push_back(*alt);
      }
    } else {
      parse_fail(line, "data outside of a section");
    }
  }
  for (const auto& [a, b] : edges) {
    for (int id : {a, b}) {
      if (!ids.contains(id)) {
        throw Error(Errc::ParseError, "edge endpoint id " + std::to_string(id) + " is not defined");
      }
    }
  }
  std::array<double, kLaneCount> lane_arr = default_lanes_ft();
  if (!lanes.empty() && lanes.size() != kLaneCount) {
    throw Error(Errc::ParseError, "[lanes] must list exactly 8 altitudes, got " + std::to_string(lanes.size()));
  }
  if (!lanes.empty()) std::copy(lanes.begin(), lanes.end(), lane_arr.begin());
  return CorridorNetwork(std::move(vps), std::move(nodes), std::move(edges), lane_arr);
}

void write_network(const CorridorNetwork& net, std::ostream& out) {
  using text::format_double;
  out << "# corridor network\n[vertiports]\n# id,lat,lon,alt,name\n";
  for (const auto& v : net.vertiports()) {
    out << v.id << ',' << format_double(v.location.latitude) << ','
        << format_double(v.location.longitude) << ',' << format_double(v.location.altitude);
    if (!v.name.empty()) out << ',' << v.name;
    out << '\n';
  }
  out << "[nodes]\n# id,lat,lon,alt\n";
  for (const auto& nd : net.nodes()) {
    out << nd.id << ',' << format_double(nd.location.latitude) << ','
        << format_double(nd.location.longitude) << ',' << format_double(nd.location.altitude) << '\n';
  }
  out << "[edges]\n# id_a,id_b\n";
  for (const auto& e : net.edges()) out << e.a << ',' << e.b << '\n';
  out << "[lanes]\n# alt_ft\n";
  for (double ft : net.lanes_ft()) out << format_double(ft) << '\n';
}

CorridorNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open network file " + path.string());
  return parse_network(in);
}

void save_network(const CorridorNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write network file " + path.string());
  write_network(net, out);
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

}  // namespace aamcm::network
