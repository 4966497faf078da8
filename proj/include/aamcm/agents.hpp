#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "aamcm/action.hpp"
#include "aamcm/network.hpp"
#include "aamcm/observation.hpp"
#include "aamcm/vehicle.hpp"

namespace aamcm::agents {

enum class PolicyKind { Heuristic, Unequipped, External };

struct PolicySpec {
  PolicyKind kind = PolicyKind::Heuristic;
  double hazard_threshold = 0.2;

  void validate() const;
};

std::optional<PolicyKind> parse_policy_kind(std::string_view name) noexcept;
std::string_view policy_kind_name(PolicyKind k) noexcept;

/// Continue, or reroute along `route` to vertiport `target`.
struct RerouteDecision {
  bool reroute = false;
  network::Route route;
  int target = 0;
};

/// The quantities the heuristic monitors, derived from the ownship state.
struct HeuristicView {
  double minutes_remaining = 0.0;  // E / E-dot
  double minutes_required = 0.0;   // rho_target / v_xy
  bool hazard_flag = false;
  int target = 0;  // vertiport the aircraft is currently heading for
};

HeuristicView heuristic_view(const AircraftState& s, const WorldView& view, double threshold);

/// Triggers on insufficient energy or a hazardous waypoint/target; on trigger
/// tries the network first, then a straight-line diversion.
RerouteDecision is_reroute_required(const AircraftState& s, const WorldView& view, double threshold);

/// Shortest network route, from the node nearest the aircraft, to any
/// vertiport whose route risk stays within `threshold`.
std::optional<network::Route> reroute_in_network(const geo::EnuPoint& position, const network::CorridorNetwork& net,
                                                 std::span<const hazards::HazardRegion> hazards, double threshold);

/// Nearest vertiport with an acceptable direct path; failing that, the
/// direct path with the lowest risk (ties to the nearer vertiport).
network::Route straight_reroute(const geo::EnuPoint& position, const network::CorridorNetwork& net,
                                std::span<const hazards::HazardRegion> hazards, double threshold);

/// Heading change in {-5,-1,0,+1,+5} closest to the bearing error toward
/// `target`; equal errors prefer the smaller turn.
Action heading_toward(const AircraftState& s, const geo::EnuPoint& target);

/// Tracks `route` from `cursor` (captured or passed waypoints are skipped).
/// Holds heading while the waypoint sits inside the turning circle.
Action route_follow_action(const AircraftState& s, const network::Route& route, std::size_t cursor,
                           double capture_radius = 250.0);

/// Advances the committed route cursor and returns the tracking action.
Action follow_route(AircraftState& s, double capture_radius = 250.0);

Action unequipped_policy(const AircraftState& s);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  /// May update the aircraft's route commitment.
  virtual Action act(AircraftState& s, const WorldView& view) = 0;
};

class HeuristicPolicy final : public Policy {
 public:
  explicit HeuristicPolicy(double hazard_threshold = 0.2) : threshold_(hazard_threshold) {}
  std::string_view name() const override { return "heuristic"; }
  Action act(AircraftState& s, const WorldView& view) override;

 private:
  double threshold_;
};

class UnequippedPolicy final : public Policy {
 public:
  std::string_view name() const override { return "unequipped"; }
  Action act(AircraftState& s, const WorldView&) override { return unequipped_policy(s); }
};

/// Builds the in-process policy for a spec; External has none and throws.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec);

}  // namespace aamcm::agents
