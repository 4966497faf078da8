#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "aamcm/geo.hpp"
#include "aamcm/rng.hpp"

namespace aamcm {

struct AircraftState;

namespace hazards {

using geo::EnuPoint;

inline constexpr double kDefaultSigma = 269.023;           // m, spatial spread
inline constexpr double kLossThresholdSigma = 0.26903;     // dimensionless
inline constexpr double kNoFlyThreshold = 0.2;
inline constexpr double kGravity = 9.80665;
inline constexpr double kPopulationBinSize = 100.0;
inline constexpr double kDefaultLethalRadius = 5.0;

enum class HazardKind { LossOfControl, NoFly };

struct HazardRegion {
  EnuPoint center;
  double sigma = kDefaultSigma;
  HazardKind kind = HazardKind::LossOfControl;

  bool operator==(const HazardRegion&) const = default;
};

/// Gaussian field value in (0, 1]; 1 at the center.
double hazard_intensity(const HazardRegion& h, const EnuPoint& p);

/// Maximum intensity over all regions; 0 when `regions` is empty.
double max_intensity(std::span<const HazardRegion> regions, const EnuPoint& p);

/// Termination threshold: |N(0, 0.26903^2)|. A flight inside a
/// loss-of-control field terminates when the local intensity exceeds it.
double sample_loss_threshold(Rng& rng, double threshold_sigma = kLossThresholdSigma);

bool no_fly_violation(const HazardRegion& h, const EnuPoint& p,
                      double threshold = kNoFlyThreshold);

struct WindField {
  double speed_kt = 0.0;
  double direction_from_deg = 0.0;

  bool operator==(const WindField&) const = default;
};

struct WindComponents {
  double east = 0.0;   // W_x, m/s
  double north = 0.0;  // W_y, m/s
};

/// Velocity of the air mass (the vector the aircraft is carried along).
WindComponents wind_components(const WindField& w);

/// Population counts on a regular 100 m grid, row-major with row 0 at `origin.y`.
struct PopulationGrid {
  EnuPoint origin;
  double bin_size = kPopulationBinSize;
  int nx = 0;
  int ny = 0;
  std::vector<double> counts;
  std::array<double, 24> hourly_scale{};

  PopulationGrid() { hourly_scale.fill(1.0); }

  /// Persons in the bin containing `p` at the given hour; 0 outside the grid.
  double population_at(const EnuPoint& p, int hour) const;
  void validate() const;

  bool operator==(const PopulationGrid&) const = default;
};

struct ImpactAssessment {
  EnuPoint impact_point;
  double casualty_probability = 0.0;  // P_c
  double population_fraction = 0.0;   // P_p
};

/// Drag-free ballistic fall from the aircraft's current state.
EnuPoint project_impact(const AircraftState& state, const WindField& wind);
EnuPoint project_impact(const EnuPoint& position, double ground_east, double ground_north);

ImpactAssessment casualty_probability(const PopulationGrid& grid, const EnuPoint& impact,
                                      int hour, double lethal_radius = kDefaultLethalRadius);

PopulationGrid load_population(const std::filesystem::path& path);
void save_population(const PopulationGrid& grid, const std::filesystem::path& path);

}  // namespace hazards
}  // namespace aamcm
