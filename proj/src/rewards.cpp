#include "aamcm/rewards.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "aamcm/error.hpp"

namespace aamcm {

std::string_view terminal_name(TerminalState t) noexcept {
  switch (t) {
    case TerminalState::Active: return "Active";
    case TerminalState::ReachedDestination: return "ReachedDestination";
    case TerminalState::ReachedAlternate: return "ReachedAlternate";
    case TerminalState::ReturnedToDeparture: return "ReturnedToDeparture";
    case TerminalState::LossOfControl: return "LossOfControl";
    case TerminalState::OutOfEnergy: return "OutOfEnergy";
    case TerminalState::NoFlyViolation: return "NoFlyViolation";
    case TerminalState::TimedOut: return "TimedOut";
  }
  return "?";
}

std::optional<TerminalState> terminal_from_name(std::string_view name) noexcept {
  for (int i = 0; i <= static_cast<int>(TerminalState::TimedOut); ++i) {
    const auto t = static_cast<TerminalState>(i);
    if (terminal_name(t) == name) return t;
  }
  return std::nullopt;
}

void EnvConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::ConfigError, what); };
  if (n_waypoints < 1 || n_probes < 1 || n_vertiports < 1) fail("observation counts must be >= 1");
  if (!(d_max > 0.0)) fail("d_max must be positive");
  if (!(sigma > 0.0)) fail("sigma must be positive");
  if (!(hazard_threshold > 0.0 && hazard_threshold < 1.0)) fail("hazard threshold must be in (0,1)");
  if (!(population_b > 0.0)) fail("b must be positive");
  if (!(decision_interval_s > 0.0 && dynamics_tick_s > 0.0)) fail("time steps must be positive");
  const double ticks = decision_interval_s / dynamics_tick_s;
  if (std::abs(ticks - std::round(ticks)) > 1e-9) fail("decision interval must be a multiple of the tick");
  if (!(max_episode_s > 0.0)) fail("max episode must be positive");
}

namespace rewards {

double reward_energy(double energy_kwh) {
  if (energy_kwh == 0.0) return kEnergyDepletedPenalty;
  if (energy_kwh > 0.0 && energy_kwh < kLowEnergyThreshold) return kLowEnergyPenalty;
  return 0.0;
}

double reward_hazard(double distance_to_center, double intensity_here, double threshold, double gate) {
  if (!(distance_to_center < gate)) return 0.0;
  return intensity_here > threshold ? kHazardExceededPenalty : kHazardNearPenalty;
}

double reward_vertiport(TerminalState reached, double energy_kwh, double usage_kwh_per_min,
                        double minutes_straight, double risk_straight) {
  switch (reached) {
    case TerminalState::ReachedDestination: return kDestinationReward;
    case TerminalState::ReachedAlternate: return kAlternateReward;
    case TerminalState::ReturnedToDeparture: {
      // E / E-dot with zero usage means unlimited remaining time.
      const double minutes_left = usage_kwh_per_min > 0.0 ? energy_kwh / usage_kwh_per_min
                                                          : std::numeric_limits<double>::infinity();
      if (minutes_left > minutes_straight && risk_straight == 0.0) return -energy_kwh / 1000.0;
      return kAlternateReward;
    }
    default:
      throw Error(Errc::InvalidTerminal,
                  "not a vertiport terminal: " + std::string(terminal_name(reached)));
  }
}

double reward_population(double casualty_probability, double population_fraction, double b) {
  const double risk = casualty_probability * population_fraction;
  return -std::log1p(risk / b) / std::log1p(1.0 / b);
}

double reward_step_shaping(double distance_to_destination, const EnvConfig& cfg) {
  const double scale = cfg.shaping_sign == ShapingSign::Literal ? -cfg.step_weight : cfg.step_weight;
  if (distance_to_destination <= cfg.d_max) {
    return scale * std::exp(-4.0 * distance_to_destination / cfg.d_max);
  }
  return scale * std::exp(-4.0);
}

double reward_action(Action a, double penalty) {
  return (a == Action::NoAction || a == Action::UseAssignedRoute) ? 0.0 : penalty;
}

}  // namespace rewards
}  // namespace aamcm
