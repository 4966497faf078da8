#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aamcm/env_config.hpp"
#include "aamcm/hazards.hpp"
#include "aamcm/network.hpp"
#include "aamcm/vehicle.hpp"

namespace aamcm {

/// Read-only snapshot of everything an observation or policy may look at.
struct WorldView {
  const network::CorridorNetwork* net = nullptr;
  std::span<const hazards::HazardRegion> hazards;
  hazards::WindField wind;
  const hazards::PopulationGrid* population = nullptr;  // null when the term is off
  double time_s = 0.0;
  int hour = 0;
  const EnvConfig* cfg = nullptr;
};

/// Flat per-aircraft state vector with named segment offsets.
struct Observation {
  std::vector<double> values;
  int n_waypoints = 2;
  int n_probes = 20;
  int n_vertiports = 29;

  static constexpr std::size_t kOwnshipScalars = 9;
  static constexpr std::size_t kPerWaypoint = 4;
  static constexpr std::size_t kPerVertiport = 3;

  std::size_t ownship_size() const noexcept { return kOwnshipScalars + kPerWaypoint * n_waypoints; }
  std::size_t destination_offset() const noexcept { return ownship_size(); }
  std::size_t destination_size() const noexcept { return 3 + n_probes + 1; }
  std::size_t vertiport_offset() const noexcept { return destination_offset() + destination_size(); }

  std::span<const double> ownship() const { return {values.data(), ownship_size()}; }
  std::span<const double> waypoint(int j) const {
    return {values.data() + kOwnshipScalars + kPerWaypoint * j, kPerWaypoint};
  }
  std::span<const double> destination() const {
    return {values.data() + destination_offset(), destination_size()};
  }
  /// N_theta ring samples followed by the ownship point.
  std::span<const double> probes() const {
    return {values.data() + destination_offset() + 3, static_cast<std::size_t>(n_probes) + 1};
  }
  std::span<const double> vertiport(int i) const {
    return {values.data() + vertiport_offset() + kPerVertiport * i, kPerVertiport};
  }
  std::size_t size() const noexcept { return values.size(); }
};

// Ownship block indices.
enum ObsIndex : std::size_t {
  kObsHeading = 0,
  kObsAltitude,
  kObsAccel,
  kObsAirspeed,
  kObsEnergy,
  kObsEnergyRate,
  kObsCasualty,
  kObsWindNorth,
  kObsWindEast,
};

/// Ring of n_probes points at probe_radius (bearings 0, 360/n, ...) plus `own`.
std::vector<geo::EnuPoint> probe_points(const geo::EnuPoint& own, const EnvConfig& cfg);

/// Next `n` flight-plan waypoints from the cursor, repeating the last one.
std::vector<geo::EnuPoint> upcoming_waypoints(const AircraftState& ac, int n);

/// P_c at the projected ballistic impact point, 0 without a population grid.
double casualty_estimate(const AircraftState& ac, const WorldView& view);

Observation assemble_observation(const AircraftState& ac, const WorldView& view);

}  // namespace aamcm
