#pragma once

#include "aamcm/action.hpp"
#include "aamcm/env_config.hpp"

namespace aamcm::rewards {

inline constexpr double kEnergyDepletedPenalty = -2.0;
inline constexpr double kLowEnergyPenalty = -0.0015;
inline constexpr double kLowEnergyThreshold = 90.0;  // kWh
inline constexpr double kHazardGate = 1000.0;        // m
inline constexpr double kHazardExceededPenalty = -0.24;
inline constexpr double kHazardNearPenalty = -0.12;
inline constexpr double kDestinationReward = 1.0;
inline constexpr double kAlternateReward = 0.5;

/// Itemized per-step reward. `total` is summed in declaration order.
struct RewardBreakdown {
  double energy = 0.0;
  double hazard = 0.0;
  double vertiport = 0.0;
  double population = 0.0;
  double step = 0.0;  // distance shaping term
  double action = 0.0;
  double total = 0.0;

  void finalize() noexcept { total = energy + hazard + vertiport + population + step + action; }
};

double reward_energy(double energy_kwh);

double reward_hazard(double distance_to_center, double intensity_here, double threshold,
                     double gate = kHazardGate);

/// `minutes_straight` is the direct-flight time to the destination;
/// `risk_straight` the hazard risk of that direct path.
double reward_vertiport(TerminalState reached, double energy_kwh, double usage_kwh_per_min,
                        double minutes_straight, double risk_straight);

/// Normalized logarithmic casualty penalty: 0 at zero risk, -1 at P_c*P_p = 1.
double reward_population(double casualty_probability, double population_fraction, double b = 0.001);

double reward_step_shaping(double distance_to_destination, const EnvConfig& cfg);

double reward_action(Action a, double penalty = -0.001);

}  // namespace aamcm::rewards
