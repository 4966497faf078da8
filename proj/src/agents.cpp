#include "aamcm/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aamcm/error.hpp"

namespace aamcm::agents {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Fastest turn reachable through heading-change actions: 5 deg per 5 s.
constexpr double kAgentTurnRateDps = 1.0;

bool is_plan_suffix(const network::Route& route, const network::Route& plan) {
  const auto& r = route.vertex_ids;
  const auto& p = plan.vertex_ids;
  if (r.empty() || r.size() > p.size()) return false;
  return std::equal(r.rbegin(), r.rend(), p.rbegin());
}

}  // namespace

void PolicySpec::validate() const {
  if (!(hazard_threshold > 0.0 && hazard_threshold < 1.0)) {
    throw Error(Errc::ConfigError, "hazard threshold must be in (0,1)");
  }
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) noexcept {
  if (name == "heuristic") return PolicyKind::Heuristic;
  if (name == "unequipped") return PolicyKind::Unequipped;
  if (name == "external") return PolicyKind::External;
  return std::nullopt;
}

std::string_view policy_kind_name(PolicyKind k) noexcept {
  switch (k) {
    case PolicyKind::Heuristic: return "heuristic";
    case PolicyKind::Unequipped: return "unequipped";
    case PolicyKind::External: return "external";
  }
  return "?";
}

HeuristicView heuristic_view(const AircraftState& s, const WorldView& view, double threshold) {
  HeuristicView hv;
  hv.target = s.active_route && s.active_route->vertiport_id ? *s.active_route->vertiport_id : s.destination_id;
  const auto& target = view.net->position(hv.target);

  hv.minutes_remaining = s.battery.usage_rate > 0.0 ? s.battery.energy_kwh / s.battery.usage_rate : kInf;
  const double rho = geo::horizontal_distance(s.position, target);
  hv.minutes_required = s.airspeed > 0.0 ? rho / s.airspeed / 60.0 : kInf;

  const int n = view.cfg->n_waypoints;
  std::vector<geo::EnuPoint> wps;
  if (s.active_route && !s.active_route->empty()) {
    const auto& rw = s.active_route->waypoints;
    for (int j = 0; j < n; ++j) wps.push_back(rw[std::min(s.route_cursor + static_cast<std::size_t>(j), rw.size() - 1)]);
  } else {
    wps = upcoming_waypoints(s, n);
  }
  for (const auto& w : wps) {
    if (hazards::max_intensity(view.hazards, w) > threshold) hv.hazard_flag = true;
  }
  if (hazards::max_intensity(view.hazards, target) > threshold) hv.hazard_flag = true;
  return hv;
}

RerouteDecision is_reroute_required(const AircraftState& s, const WorldView& view, double threshold) {
  const auto hv = heuristic_view(s, view, threshold);
  RerouteDecision d;
  if (!(hv.minutes_required > hv.minutes_remaining) && !hv.hazard_flag) return d;
  auto route = reroute_in_network(s.position, *view.net, view.hazards, threshold);
  if (!route) route = straight_reroute(s.position, *view.net, view.hazards, threshold);
  d.reroute = true;
  d.target = *route->vertiport_id;
  d.route = std::move(*route);
  return d;
}

std::optional<network::Route> reroute_in_network(const geo::EnuPoint& position, const network::CorridorNetwork& net,
                                                 std::span<const hazards::HazardRegion> hazards,
                                                 double threshold) {
  if (net.nodes().empty()) return std::nullopt;
  const network::ShortestPathTree tree(net, network::nearest_node(net, position).id);
  std::optional<network::Route> best;
  double rho_min = kInf;
  for (const auto& vp : net.vertiports()) {
    if (!tree.reachable(vp.id)) continue;
    const double len = tree.distance(vp.id);
    if (!(len < rho_min)) continue;
    const auto path = tree.path_to(vp.id);
    auto route = network::make_route(net, path, hazards);
    if (route.risk <= threshold) {
      rho_min = len;
      best = std::move(route);
    }
  }
  return best;
}

network::Route straight_reroute(const geo::EnuPoint& position, const network::CorridorNetwork& net,
                                std::span<const hazards::HazardRegion> hazards, double threshold) {
  if (net.vertiports().empty()) throw Error(Errc::EmptyNetwork, "network has no vertiports");
  std::optional<network::Route> feasible;
  std::optional<network::Route> safest;
  for (const auto& vp : net.vertiports()) {
    auto r = network::straight_route(position, net.position(vp.id), hazards);
    r.vertiport_id = vp.id;
    r.vertex_ids = {vp.id};
    if (r.risk <= threshold && (!feasible || r.total_length < feasible->total_length)) feasible = r;
    if (!safest || r.risk < safest->risk || (r.risk == safest->risk && r.total_length < safest->total_length)) {
      safest = r;
    }
  }
  return feasible ? *feasible : *safest;
}

Action heading_toward(const AircraftState& s, const geo::EnuPoint& target) {
  const double err = geo::wrap_180(geo::range_bearing(s.position, target).bearing - s.heading);
  // Candidates by increasing turn size so ties keep the smaller turn.
  static constexpr Action kOrder[] = {Action::HoldHeading, Action::TurnLeft1, Action::TurnRight1,
                                      Action::TurnLeft5, Action::TurnRight5};
  Action best = Action::HoldHeading;
  double best_err = kInf;
  for (Action a : kOrder) {
    const double e = std::abs(err - heading_delta(a));
    if (e < best_err) {
      best_err = e;
      best = a;
    }
  }
  return best;
}

Action route_follow_action(const AircraftState& s, const network::Route& route, std::size_t cursor,
                           double capture_radius) {
  if (route.empty()) throw Error(Errc::InvalidRoute, "cannot follow an empty route");
  cursor = advance_cursor(route.waypoints, cursor, s.position, capture_radius);
  const auto& target = route.waypoints[cursor];
  if (inside_turn_circle(s.position, s.heading, s.airspeed, kAgentTurnRateDps, target)) return Action::HoldHeading;
  return heading_toward(s, target);
}

Action follow_route(AircraftState& s, double capture_radius) {
  const auto& route = *s.active_route;
  s.route_cursor = advance_cursor(route.waypoints, s.route_cursor, s.position, capture_radius);
  return route_follow_action(s, route, s.route_cursor, capture_radius);
}

Action unequipped_policy(const AircraftState&) { return Action::UseAssignedRoute; }

Action HeuristicPolicy::act(AircraftState& s, const WorldView& view) {
  auto d = is_reroute_required(s, view, threshold_);
  if (d.reroute) {
    const bool same_target = s.active_route && s.active_route->vertiport_id == d.target;
    if (!same_target) {
      if (d.target == s.destination_id && is_plan_suffix(d.route, s.flight_plan)) {
        s.active_route.reset();
        s.route_cursor = 0;
        return Action::UseAssignedRoute;
      }
      s.active_route = std::move(d.route);
      s.route_cursor = 0;
    }
  }
  if (s.active_route) return follow_route(s, view.cfg->limits.capture_radius_m);
  return Action::NoAction;
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case PolicyKind::Heuristic: return std::make_unique<HeuristicPolicy>(spec.hazard_threshold);
    case PolicyKind::Unequipped: return std::make_unique<UnequippedPolicy>();
    case PolicyKind::External: break;
  }
  throw Error(Errc::ConfigError, "external policies are driven over the protocol");
}

}  // namespace aamcm::agents
