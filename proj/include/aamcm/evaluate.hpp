#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aamcm/env_config.hpp"
#include "aamcm/metrics.hpp"
#include "aamcm/scenario.hpp"

namespace aamcm {

struct EvaluationOptions {
  int days = 10;
  std::vector<std::string> agents{"heuristic", "unequipped"};
  std::uint64_t seed = 1;
  scenario::ScenarioConfig scenario_config = evaluation_defaults();
  EnvConfig env;
  int jobs = 1;

  /// Full-curriculum scenario with the loss-of-control field held on the
  /// busiest corridor node and no no-fly zone.
  static scenario::ScenarioConfig evaluation_defaults();
};

struct EvaluationResult {
  std::vector<metrics::FlightRecord> records;  // day-major, agents in option order
  std::map<std::string, metrics::EvaluationSummary> summaries;
  std::size_t peak_airborne = 0;  // over all days and agents
};

/// Seed shared by every agent on a given day.
std::uint64_t day_seed(std::uint64_t seed, int day);

/// Runs one full episode for `agent` and returns its flight records.
std::vector<metrics::FlightRecord> run_day(const scenario::Scenario& sc, const EnvConfig& env,
                                           const std::string& agent, std::uint64_t seed, int day,
                                           std::size_t* peak_airborne = nullptr);

EvaluationResult run_evaluation(const EvaluationOptions& opts);

}  // namespace aamcm
