#include "aamcm/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aamcm/error.hpp"

namespace aamcm {

std::string_view action_name(Action a) noexcept {
  switch (a) {
    case Action::TurnLeft5: return "HeadingChange(-5)";
    case Action::TurnLeft1: return "HeadingChange(-1)";
    case Action::HoldHeading: return "HeadingChange(0)";
    case Action::TurnRight1: return "HeadingChange(+1)";
    case Action::TurnRight5: return "HeadingChange(+5)";
    case Action::NoAction: return "NoAction";
    case Action::UseAssignedRoute: return "UseAssignedFlightRoute";
  }
  return "?";
}

BatteryModel init_battery(Rng& rng, const EnergyConfig& cfg) {
  BatteryModel b;
  b.energy_kwh = rng.uniform(cfg.energy_min_kwh, cfg.energy_max_kwh);
  b.consumption_rate = cfg.consumption_rate;
  b.cycle_factor = rng.uniform(cfg.cycle_factor_min, cfg.cycle_factor_max);
  b.failure_probability = cfg.failure_probability;
  if (rng.bernoulli(cfg.failure_probability)) {
    const double endurance_s = b.energy_kwh / b.nominal_rate() * 60.0;
    b.failure_time_s = rng.uniform(0.0, endurance_s);
  }
  b.usage_rate = b.nominal_rate();
  return b;
}

BatteryModel consume_energy(BatteryModel b, double dt) {
  if (!(dt > 0.0)) throw Error(Errc::InvalidTimestep, "dt must be positive");
  const double before = b.energy_kwh;
  b.elapsed_s += dt;
  if (b.failure_time_s && b.elapsed_s >= *b.failure_time_s) {
    b.energy_kwh = 0.0;
  } else {
    b.energy_kwh = std::max(0.0, b.energy_kwh - b.nominal_rate() * dt / 60.0);
  }
  b.usage_rate = (before - b.energy_kwh) * (60.0 / dt);
  return b;
}

double clamp_airspeed(AircraftModel type, double mps) {
  const auto& t = aircraft_type(type);
  return std::clamp(mps, t.speed_min_kt * geo::kKnotsToMps, t.speed_max_kt * geo::kKnotsToMps);
}

bool inside_turn_circle(const EnuPoint& position, double heading_deg, double speed,
                        double turn_rate_dps, const EnuPoint& target) {
  const auto rb = geo::range_bearing(position, target);
  if (rb.distance == 0.0 || turn_rate_dps <= 0.0) return false;
  const double err = geo::wrap_180(rb.bearing - heading_deg);
  if (err == 0.0 || err == 180.0) return false;
  const double radius = speed / (turn_rate_dps * geo::kDegToRad);
  const double side = (err > 0.0 ? 90.0 : -90.0);
  const double h = (heading_deg + side) * geo::kDegToRad;
  const EnuPoint center{position.x + radius * std::sin(h), position.y + radius * std::cos(h), 0.0};
  return geo::horizontal_distance(center, target) < radius;
}

std::size_t advance_cursor(std::span<const EnuPoint> waypoints, std::size_t cursor,
                           const EnuPoint& position, double capture_radius) {
  while (cursor + 1 < waypoints.size()) {
    const auto& wp = waypoints[cursor];
    if (geo::horizontal_distance(position, wp) < capture_radius) {
      ++cursor;
      continue;
    }
    // Passed: beyond the perpendicular through wp along the inbound leg
    // (or the outbound leg for the first waypoint).
    const auto& from = cursor > 0 ? waypoints[cursor - 1] : wp;
    const auto& to = cursor > 0 ? wp : waypoints[cursor + 1];
    const double lx = to.x - from.x;
    const double ly = to.y - from.y;
    const double along = (position.x - wp.x) * lx + (position.y - wp.y) * ly;
    if ((lx != 0.0 || ly != 0.0) && along > 0.0) {
      ++cursor;
      continue;
    }
    break;
  }
  return std::min(cursor, waypoints.empty() ? 0 : waypoints.size() - 1);
}

std::size_t nearest_plan_waypoint(const network::Route& plan, const EnuPoint& p) {
  std::size_t best = std::min<std::size_t>(1, plan.waypoints.size() - 1);
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < plan.waypoints.size(); ++i) {
    const double d = geo::horizontal_distance(plan.waypoints[i], p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

AircraftState apply_action(AircraftState state, Action a) {
  if (is_heading_change(a)) {
    state.mode = GuidanceMode::Heading;
    state.commanded_turn = heading_delta(a);
    return state;
  }
  state.commanded_turn = 0.0;
  if (a == Action::UseAssignedRoute) {
    state.active_route.reset();
    state.route_cursor = 0;
    if (state.mode != GuidanceMode::FlightPlan && !state.flight_plan.empty()) {
      state.plan_cursor = nearest_plan_waypoint(state.flight_plan, state.position);
    }
    state.mode = GuidanceMode::FlightPlan;
  }
  return state;
}

hazards::WindComponents ground_velocity(const AircraftState& state, const hazards::WindField& wind) {
  const auto w = hazards::wind_components(wind);
  const double h = state.heading * geo::kDegToRad;
  return {state.airspeed * std::sin(h) + w.east, state.airspeed * std::cos(h) + w.north};
}

AircraftState step_dynamics(AircraftState state, const hazards::WindField& wind, double dt,
                            const DynamicsLimits& limits) {
  if (!(dt > 0.0)) throw Error(Errc::InvalidTimestep, "dt must be positive");

  if (state.mode == GuidanceMode::Heading) {
    state.heading = geo::wrap_360(state.heading + state.commanded_turn * dt / limits.decision_interval_s);
  } else if (state.flight_plan.waypoints.size() >= 2) {
    const auto& wps = state.flight_plan.waypoints;
    state.plan_cursor = advance_cursor(wps, state.plan_cursor, state.position, limits.capture_radius_m);
    const auto& target = wps[state.plan_cursor];
    const auto rb = geo::range_bearing(state.position, target);
    if (rb.distance > 0.0 &&
        !inside_turn_circle(state.position, state.heading, state.airspeed,
                            limits.autopilot_turn_rate_dps, target)) {
      const double max_turn = limits.autopilot_turn_rate_dps * dt;
      const double err = geo::wrap_180(rb.bearing - state.heading);
      state.heading = geo::wrap_360(state.heading + std::clamp(err, -max_turn, max_turn));
    }
  }

  const double speed = clamp_airspeed(state.type, state.commanded_airspeed);
  state.accel = (speed - state.airspeed) / dt;
  state.airspeed = speed;

  const auto gv = ground_velocity(state, wind);
  state.position.x += gv.east * dt;
  state.position.y += gv.north * dt;
  state.flight_time_s += dt;
  return state;
}

}  // namespace aamcm
