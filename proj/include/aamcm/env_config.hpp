#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include "aamcm/vehicle.hpp"

namespace aamcm {

enum class TerminalState {
  Active,
  ReachedDestination,
  ReachedAlternate,
  ReturnedToDeparture,
  LossOfControl,
  OutOfEnergy,
  NoFlyViolation,
  TimedOut,
};

inline constexpr std::array<TerminalState, 6> kOutcomeClasses = {
    TerminalState::ReachedDestination, TerminalState::ReachedAlternate,
    TerminalState::ReturnedToDeparture, TerminalState::LossOfControl,
    TerminalState::OutOfEnergy, TerminalState::NoFlyViolation};

std::string_view terminal_name(TerminalState t) noexcept;
std::optional<TerminalState> terminal_from_name(std::string_view name) noexcept;

constexpr bool is_vertiport_terminal(TerminalState t) noexcept {
  return t == TerminalState::ReachedDestination || t == TerminalState::ReachedAlternate ||
         t == TerminalState::ReturnedToDeparture;
}

/// Which reward terms (and the hazards behind them) a scenario enables.
struct RewardTerms {
  bool energy = true;      // battery drain, low-energy and depletion penalties
  bool hazard = true;      // loss-of-control and no-fly fields
  bool population = true;  // casualty estimate and population penalty
};

/// Sign convention for the distance-to-destination shaping term.
enum class ShapingSign {
  Literal,  // -delta_step * exp(...), positive with delta_step < 0
  Penalty,  // +delta_step * exp(...), always a penalty
};

struct EnvConfig {
  int n_waypoints = 2;
  int n_probes = 20;
  int n_vertiports = 29;
  double d_max = 647391.47;
  double action_penalty = -0.001;
  double step_weight = -0.0001;
  double energy_depleted_penalty = -2.0;
  /// Carried for completeness; no reward term uses it.
  double p_max = -0.00015;
  double sigma = 269.023;
  double no_fly_threshold = 0.2;
  double hazard_threshold = 0.2;
  double population_b = 0.001;
  double probe_radius = 500.0;
  double goal_radius = 500.0;
  double hazard_gate_radius = 1000.0;
  double loss_threshold_sigma = 0.26903;
  double lethal_radius = 5.0;

  double decision_interval_s = 5.0;
  double dynamics_tick_s = 1.0;
  double max_episode_s = 3.0 * 3600.0;

  ShapingSign shaping_sign = ShapingSign::Literal;
  RewardTerms terms;
  DynamicsLimits limits;

  std::size_t observation_size() const noexcept {
    return static_cast<std::size_t>((9 + 4 * n_waypoints) + (3 + n_probes + 1) + 3 * n_vertiports);
  }
  void validate() const;
};

}  // namespace aamcm
