#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aamcm/agents.hpp"
#include "aamcm/env_config.hpp"
#include "aamcm/metrics.hpp"
#include "aamcm/observation.hpp"
#include "aamcm/rewards.hpp"
#include "aamcm/scenario.hpp"

namespace aamcm {

struct StepResult {
  std::map<int, Observation> observations;  // aircraft active after the step
  /// Keyed by the aircraft that were active when the step began.
  std::map<int, rewards::RewardBreakdown> rewards;
  std::map<int, TerminalState> terminals;
  std::map<int, Action> actions;
  std::map<int, AircraftState> states;  // end-of-step state, terminated ones included
  double time_s = 0.0;
  bool done = false;
};

/// Multi-aircraft episode over one scenario. Single writer: reset and step
/// must not run concurrently on the same instance.
class World {
 public:
  explicit World(scenario::Scenario scenario, EnvConfig cfg = {});

  /// Rebuilds traffic, hazards and wind from `seed`. Records carry global
  /// flight ids day * kDayStride + local id.
  std::map<int, Observation> reset(std::uint64_t seed, int day = 0);
  StepResult step(const std::map<int, Action>& actions);
  /// Queries `policy` for every active aircraft in id order, then steps.
  StepResult step_with(agents::Policy& policy);

  bool initialized() const noexcept { return initialized_; }
  bool done() const noexcept { return done_; }
  double time_s() const noexcept { return clock_; }
  const EnvConfig& config() const noexcept { return cfg_; }
  const scenario::Scenario& scenario() const noexcept { return scenario_; }
  const std::vector<hazards::HazardRegion>& hazards() const noexcept { return hazards_; }
  const hazards::WindField& wind() const noexcept { return wind_; }
  const scenario::TrafficSchedule& schedule() const noexcept { return schedule_; }
  std::vector<int> active_ids() const;
  const AircraftState& aircraft(int id) const;
  WorldView view() const;

  void set_agent_label(std::string label) { agent_ = std::move(label); }
  const std::vector<metrics::FlightRecord>& records() const noexcept { return records_; }
  std::vector<metrics::FlightRecord> take_records();
  std::size_t departures() const noexcept { return departures_; }
  std::size_t peak_airborne() const noexcept { return peak_airborne_; }

 private:
  struct Flight {
    AircraftState state;
    Rng rng{0};
    double spawn_time = 0.0;
    double reward_sum = 0.0;
    int actions = 0;
    std::vector<geo::GeoPoint> track;
  };

  void spawn_due();
  std::map<int, Observation> observe() const;
  void finish(int id, Flight& f, TerminalState t, double pc);
  Flight& flight(int id);

  scenario::Scenario scenario_;
  EnvConfig cfg_;
  std::string agent_;
  std::uint64_t seed_ = 0;
  int day_ = 0;
  bool initialized_ = false;
  bool done_ = false;
  double clock_ = 0.0;
  scenario::TrafficSchedule schedule_;
  std::size_t next_flight_ = 0;
  std::vector<hazards::HazardRegion> hazards_;
  hazards::WindField wind_;
  std::map<int, Flight> active_;
  std::vector<metrics::FlightRecord> records_;
  std::size_t departures_ = 0;
  std::size_t peak_airborne_ = 0;
};

}  // namespace aamcm
