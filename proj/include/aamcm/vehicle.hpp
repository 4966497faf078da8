#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "aamcm/action.hpp"
#include "aamcm/geo.hpp"
#include "aamcm/hazards.hpp"
#include "aamcm/network.hpp"
#include "aamcm/rng.hpp"

namespace aamcm {

using geo::EnuPoint;

enum class AircraftModel { UamA = 0, UamB = 1, UamC = 2, UamD = 3 };

struct AircraftType {
  std::string_view name;
  double speed_min_kt;
  double speed_max_kt;
  double charge_min_kwh;
  double charge_max_kwh;
};

inline constexpr std::array<AircraftType, 4> kAircraftTypes = {{
    {"UAM-A", 20.0, 174.0, 20.0, 250.0},
    {"UAM-B", 20.0, 156.0, 20.0, 250.0},
    {"UAM-C", 20.0, 148.0, 20.0, 250.0},
    {"UAM-D", 20.0, 130.0, 20.0, 250.0},
}};

inline const AircraftType& aircraft_type(AircraftModel m) {
  return kAircraftTypes[static_cast<std::size_t>(m)];
}

/// Linear battery model. Energy drains at consumption_rate * cycle_factor
/// kWh/min; a scheduled failure zeroes the charge at once.
struct BatteryModel {
  double energy_kwh = 0.0;
  double consumption_rate = 6.0;  // kWh/min at cycle_factor 1
  double cycle_factor = 1.0;
  double failure_probability = 0.0;
  std::optional<double> failure_time_s;
  double elapsed_s = 0.0;
  /// Energy used over the last consumption interval, kWh/min.
  double usage_rate = 0.0;

  double nominal_rate() const noexcept { return consumption_rate * cycle_factor; }
};

struct EnergyConfig {
  double energy_min_kwh = 20.0;
  double energy_max_kwh = 250.0;
  double consumption_rate = 6.0;
  double cycle_factor_min = 1.0;
  double cycle_factor_max = 1.25;
  double failure_probability = 0.01;
};

BatteryModel init_battery(Rng& rng, const EnergyConfig& cfg);
BatteryModel consume_energy(BatteryModel b, double dt);

enum class GuidanceMode {
  FlightPlan,  // the onboard autopilot tracks the assigned flight plan
  Heading,     // heading is held or turned by agent commands
};

struct AircraftState {
  int id = 0;
  AircraftModel type = AircraftModel::UamA;
  EnuPoint position;
  double heading = 0.0;             // degrees, [0, 360)
  double airspeed = 0.0;            // m/s
  double commanded_airspeed = 0.0;  // m/s
  double accel = 0.0;               // m/s^2
  BatteryModel battery;

  network::Route flight_plan;
  std::size_t plan_cursor = 1;
  /// Contingency route committed by an onboard agent, if any.
  std::optional<network::Route> active_route;
  std::size_t route_cursor = 0;

  int departure_id = 0;
  int destination_id = 0;
  int lane = 0;

  GuidanceMode mode = GuidanceMode::FlightPlan;
  double commanded_turn = 0.0;  // degrees per decision interval
  bool left_departure = false;
  double flight_time_s = 0.0;
};

struct DynamicsLimits {
  double decision_interval_s = 5.0;
  /// Autopilot turn rate while tracking the flight plan.
  double autopilot_turn_rate_dps = 3.0;
  double capture_radius_m = 250.0;
};

/// Updates guidance mode and commanded turn for one decision interval.
AircraftState apply_action(AircraftState state, Action a);

AircraftState step_dynamics(AircraftState state, const hazards::WindField& wind, double dt,
                            const DynamicsLimits& limits = {});

/// Ground velocity (east, north) in m/s.
hazards::WindComponents ground_velocity(const AircraftState& state, const hazards::WindField& wind);

/// Advances `cursor` past waypoints that are captured or already passed.
/// The last waypoint is never skipped.
std::size_t advance_cursor(std::span<const EnuPoint> waypoints, std::size_t cursor,
                           const EnuPoint& position, double capture_radius);

/// Index (>= 1) of the flight-plan waypoint nearest to `p`.
std::size_t nearest_plan_waypoint(const network::Route& plan, const EnuPoint& p);

/// True when `target` lies inside the turning circle on the side it is on,
/// i.e. turning at `turn_rate_dps` can never bring the aircraft over it.
bool inside_turn_circle(const EnuPoint& position, double heading_deg, double speed,
                        double turn_rate_dps, const EnuPoint& target);

double clamp_airspeed(AircraftModel type, double mps);

}  // namespace aamcm
