#include "aamcm/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "aamcm/agents.hpp"
#include "aamcm/error.hpp"
#include "aamcm/world.hpp"

namespace aamcm {

scenario::ScenarioConfig EvaluationOptions::evaluation_defaults() {
  auto cfg = scenario::curriculum_preset(scenario::Curriculum::T5);
  cfg.hazard_mode = scenario::HazardMode::Evaluation;
  cfg.no_fly_count = 0;
  return cfg;
}

std::uint64_t day_seed(std::uint64_t seed, int day) {
  return Rng::derive(seed, 0xDA70000ULL + static_cast<std::uint64_t>(day)).next_u64();
}

std::vector<metrics::FlightRecord> run_day(const scenario::Scenario& sc, const EnvConfig& env,
                                           const std::string& agent, std::uint64_t seed, int day,
                                           std::size_t* peak_airborne) {
  const auto kind = agents::parse_policy_kind(agent);
  if (!kind || *kind == agents::PolicyKind::External) {
    throw Error(Errc::ConfigError, "unknown agent '" + agent + "'");
  }
  agents::PolicySpec spec;
  spec.kind = *kind;
  spec.hazard_threshold = env.hazard_threshold;
  auto policy = agents::make_policy(spec);

  World world(sc, env);
  world.set_agent_label(agent);
  world.reset(seed, day);
  while (!world.done()) world.step_with(*policy);
  if (peak_airborne) *peak_airborne = world.peak_airborne();
  return world.take_records();
}

EvaluationResult run_evaluation(const EvaluationOptions& opts) {
  if (opts.days < 1) throw Error(Errc::ConfigError, "--days must be >= 1");
  if (opts.agents.empty()) throw Error(Errc::ConfigError, "at least one agent is required");
  for (const auto& a : opts.agents) {
    const auto kind = agents::parse_policy_kind(a);
    if (!kind || *kind == agents::PolicyKind::External) throw Error(Errc::ConfigError, "unknown agent '" + a + "'");
  }
  const auto sc = scenario::materialize(opts.scenario_config);

  std::vector<std::vector<metrics::FlightRecord>> per_day(static_cast<std::size_t>(opts.days));
  std::vector<std::size_t> peaks(static_cast<std::size_t>(opts.days), 0);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (int d = next++; d < opts.days; d = next++) {
      try {
        const auto seed = day_seed(opts.seed, d);
        auto& out = per_day[static_cast<std::size_t>(d)];
        for (const auto& agent : opts.agents) {
          std::size_t peak = 0;
          auto recs = run_day(sc, opts.env, agent, seed, d, &peak);
          peaks[static_cast<std::size_t>(d)] = std::max(peaks[static_cast<std::size_t>(d)], peak);
          spdlog::debug("day {} agent {}: {} flights", d, agent, recs.size());
          out.insert(out.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
        }
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp(opts.jobs, 1, opts.days);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  EvaluationResult res;
  for (auto& day : per_day) {
    res.records.insert(res.records.end(), std::make_move_iterator(day.begin()), std::make_move_iterator(day.end()));
  }
  res.summaries = metrics::summarize_by_agent(res.records, opts.seed);
  res.peak_airborne = *std::max_element(peaks.begin(), peaks.end());
  return res;
}

}  // namespace aamcm
