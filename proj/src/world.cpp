#include "aamcm/world.hpp"

#include <cmath>
#include <limits>

#include "aamcm/error.hpp"

namespace aamcm {

namespace {

constexpr std::uint64_t kTrafficStream = 1;
constexpr std::uint64_t kHazardStream = 2;
constexpr std::uint64_t kWindStream = 3;
constexpr std::uint64_t kAircraftStreamBase = 0x100000;

}  // namespace

World::World(scenario::Scenario scenario, EnvConfig cfg) : scenario_(std::move(scenario)), cfg_(cfg) {
  if (!scenario_.network) throw Error(Errc::ConfigError, "scenario has no network");
  scenario_.config.validate();
  cfg_.terms = scenario_.config.terms;
  cfg_.sigma = scenario_.config.hazard_sigma;
  cfg_.validate();
  if (cfg_.terms.population && !scenario_.population) {
    throw Error(Errc::ConfigError, "population term enabled without a population grid");
  }
}

std::map<int, Observation> World::reset(std::uint64_t seed, int day) {
  seed_ = seed;
  day_ = day;
  clock_ = 0.0;
  done_ = false;
  next_flight_ = 0;
  active_.clear();
  records_.clear();
  departures_ = 0;
  peak_airborne_ = 0;

  const auto& sc = scenario_.config;
  const auto& net = *scenario_.network;
  Rng traffic_rng = Rng::derive(seed, kTrafficStream);
  Rng hazard_rng = Rng::derive(seed, kHazardStream);
  Rng wind_rng = Rng::derive(seed, kWindStream);
  schedule_ = scenario::generate_traffic(sc, net, traffic_rng);
  hazards_ = scenario::place_hazards(sc, net, hazard_rng);
  wind_ = scenario::sample_wind(sc, wind_rng);
  initialized_ = true;

  spawn_due();
  return observe();
}

WorldView World::view() const {
  WorldView v;
  v.net = scenario_.network.get();
  v.hazards = hazards_;
  v.wind = wind_;
  v.population = cfg_.terms.population ? scenario_.population.get() : nullptr;
  v.time_s = clock_;
  v.hour = (scenario_.config.start_hour + static_cast<int>(clock_ / 3600.0)) % 24;
  v.cfg = &cfg_;
  return v;
}

std::vector<int> World::active_ids() const {
  std::vector<int> ids;
  for (const auto& [id, f] : active_) ids.push_back(id);
  return ids;
}

World::Flight& World::flight(int id) {
  const auto it = active_.find(id);
  if (it == active_.end()) throw Error(Errc::UnknownAircraft, "no active aircraft " + std::to_string(id));
  return it->second;
}

const AircraftState& World::aircraft(int id) const {
  const auto it = active_.find(id);
  if (it == active_.end()) throw Error(Errc::UnknownAircraft, "no active aircraft " + std::to_string(id));
  return it->second.state;
}

void World::spawn_due() {
  const auto& net = *scenario_.network;
  const auto& sc = scenario_.config;
  while (next_flight_ < schedule_.size() && schedule_[next_flight_].departure_time_s <= clock_ &&
         static_cast<int>(active_.size()) < sc.max_airborne) {
    const auto& sf = schedule_[next_flight_++];
    Flight f;
    f.rng = Rng::derive(seed_, kAircraftStreamBase + static_cast<std::uint64_t>(sf.flight_id));
    f.spawn_time = clock_;
    auto& s = f.state;
    s.id = sf.flight_id;
    s.type = sf.type;
    s.lane = sf.lane;
    s.departure_id = sf.origin;
    s.destination_id = sf.destination;
    s.flight_plan = network::make_route(net, sf.plan, hazards_);
    s.plan_cursor = 1;
    s.position = net.position(sf.origin);
    s.position.z = net.lanes_ft()[static_cast<std::size_t>(sf.lane)] * geo::kFeetToMeters;
    s.heading = geo::range_bearing(s.position, s.flight_plan.waypoints[1]).bearing;
    s.airspeed = clamp_airspeed(s.type, sf.initial_speed_kt * geo::kKnotsToMps);
    s.commanded_airspeed = s.airspeed;
    s.battery = init_battery(f.rng, sc.energy);
    if (!cfg_.terms.energy) {
      s.battery.failure_time_s.reset();
      s.battery.usage_rate = 0.0;
    }
    f.track.push_back(geo::to_geo(s.position, net.projection()));
    active_.emplace(s.id, std::move(f));
    ++departures_;
  }
  peak_airborne_ = std::max(peak_airborne_, active_.size());
}

std::map<int, Observation> World::observe() const {
  std::map<int, Observation> out;
  const auto v = view();
  for (const auto& [id, f] : active_) out.emplace(id, assemble_observation(f.state, v));
  return out;
}

void World::finish(int id, Flight& f, TerminalState t, double pc) {
  metrics::FlightRecord r;
  r.flight_id = static_cast<std::int64_t>(day_) * metrics::kDayStride + id;
  r.agent = agent_;
  r.terminal = t;
  r.total_reward = f.reward_sum;
  r.flight_time_s = clock_ - f.spawn_time;
  r.actions = f.actions;
  r.pc_terminal = pc;
  r.track = std::move(f.track);
  records_.push_back(std::move(r));
}

std::vector<metrics::FlightRecord> World::take_records() {
  auto out = std::move(records_);
  records_.clear();
  return out;
}

StepResult World::step_with(agents::Policy& policy) {
  if (!initialized_ || done_) throw Error(Errc::NotInitialized, "reset required before stepping");
  std::map<int, Action> actions;
  const auto v = view();
  for (auto& [id, f] : active_) actions.emplace(id, policy.act(f.state, v));
  return step(actions);
}

StepResult World::step(const std::map<int, Action>& actions) {
  if (!initialized_) throw Error(Errc::NotInitialized, "reset required before stepping");
  if (done_) throw Error(Errc::NotInitialized, "episode finished; reset required");
  for (const auto& [id, a] : actions) {
    if (!active_.contains(id)) throw Error(Errc::UnknownAircraft, "no active aircraft " + std::to_string(id));
  }

  const auto& net = *scenario_.network;
  StepResult res;
  for (auto& [id, f] : active_) {
    const auto it = actions.find(id);
    const Action a = it == actions.end() ? Action::NoAction : it->second;
    f.state = apply_action(std::move(f.state), a);
    if (is_heading_change(a)) ++f.actions;
    res.actions.emplace(id, a);
  }

  const int ticks = static_cast<int>(std::lround(cfg_.decision_interval_s / cfg_.dynamics_tick_s));
  for (auto& [id, f] : active_) {
    const double energy_before = f.state.battery.energy_kwh;
    for (int k = 0; k < ticks; ++k) {
      if (cfg_.terms.energy && f.state.battery.energy_kwh <= 0.0) break;
      f.state = step_dynamics(std::move(f.state), wind_, cfg_.dynamics_tick_s, cfg_.limits);
      if (cfg_.terms.energy) f.state.battery = consume_energy(f.state.battery, cfg_.dynamics_tick_s);
    }
    // Usage over the whole decision step, kWh/min.
    if (cfg_.terms.energy) {
      f.state.battery.usage_rate = (energy_before - f.state.battery.energy_kwh) * 60.0 / cfg_.decision_interval_s;
    }
  }

  clock_ += cfg_.decision_interval_s;
  const WorldView v = view();
  std::vector<int> ended;
  std::map<int, double> ended_pc;

  for (auto& [id, f] : active_) {
    auto& s = f.state;
    const auto& dest = net.position(s.destination_id);
    if (!s.left_departure && geo::horizontal_distance(s.position, net.position(s.departure_id)) > cfg_.goal_radius) {
      s.left_departure = true;
    }

    // Loss-of-control thresholds, one per nearby region, in region order.
    std::vector<double> beta(hazards_.size(), -1.0);
    if (cfg_.terms.hazard) {
      for (std::size_t h = 0; h < hazards_.size(); ++h) {
        if (hazards_[h].kind == hazards::HazardKind::LossOfControl &&
            geo::horizontal_distance(s.position, hazards_[h].center) < cfg_.hazard_gate_radius) {
          beta[h] = hazards::sample_loss_threshold(f.rng, cfg_.loss_threshold_sigma);
        }
      }
    }

    TerminalState term = TerminalState::Active;
    double best = std::numeric_limits<double>::infinity();
    int reached = 0;
    for (const auto& vp : net.vertiports()) {
      if (vp.id == s.departure_id && !s.left_departure) continue;
      const double d = geo::horizontal_distance(s.position, net.position(vp.id));
      if (d < cfg_.goal_radius && d < best) {
        best = d;
        reached = vp.id;
      }
    }
    if (reached != 0) {
      term = reached == s.destination_id   ? TerminalState::ReachedDestination
             : reached == s.departure_id ? TerminalState::ReturnedToDeparture
                                         : TerminalState::ReachedAlternate;
    } else if (cfg_.terms.energy && s.battery.energy_kwh <= 0.0) {
      term = TerminalState::OutOfEnergy;
    } else if (cfg_.terms.hazard) {
      for (const auto& h : hazards_) {
        if (h.kind == hazards::HazardKind::NoFly && hazards::no_fly_violation(h, s.position, cfg_.no_fly_threshold)) {
          term = TerminalState::NoFlyViolation;
          break;
        }
      }
      for (std::size_t h = 0; term == TerminalState::Active && h < hazards_.size(); ++h) {
        if (beta[h] >= 0.0 && hazards::hazard_intensity(hazards_[h], s.position) > beta[h]) {
          term = TerminalState::LossOfControl;
        }
      }
    }

    rewards::RewardBreakdown r;
    if (cfg_.terms.energy) r.energy = rewards::reward_energy(s.battery.energy_kwh);
    if (cfg_.terms.hazard && !hazards_.empty()) {
      std::size_t nearest = 0;
      double dn = std::numeric_limits<double>::infinity();
      for (std::size_t h = 0; h < hazards_.size(); ++h) {
        const double d = geo::horizontal_distance(s.position, hazards_[h].center);
        if (d < dn) {
          dn = d;
          nearest = h;
        }
      }
      const auto& h = hazards_[nearest];
      const double b = h.kind == hazards::HazardKind::NoFly ? cfg_.no_fly_threshold : beta[nearest];
      r.hazard = rewards::reward_hazard(dn, hazards::hazard_intensity(h, s.position), b, cfg_.hazard_gate_radius);
    }
    if (is_vertiport_terminal(term)) {
      const double minutes_straight =
          s.airspeed > 0.0 ? geo::horizontal_distance(s.position, dest) / s.airspeed / 60.0
                           : std::numeric_limits<double>::infinity();
      const std::array<geo::EnuPoint, 2> straight{s.position, dest};
      const double risk = network::route_risk(straight, hazards_);
      r.vertiport = rewards::reward_vertiport(term, s.battery.energy_kwh, s.battery.usage_rate, minutes_straight, risk);
    }
    double pc = 0.0;
    if (v.population != nullptr && term != TerminalState::Active) {
      const auto impact = hazards::project_impact(s, wind_);
      const auto ia = hazards::casualty_probability(*v.population, impact, v.hour, cfg_.lethal_radius);
      pc = ia.casualty_probability;
      if (term == TerminalState::OutOfEnergy) {
        r.population = rewards::reward_population(ia.casualty_probability, ia.population_fraction, cfg_.population_b);
      }
    }
    r.step = rewards::reward_step_shaping(geo::horizontal_distance(s.position, dest), cfg_);
    r.action = rewards::reward_action(res.actions.at(id), cfg_.action_penalty);
    r.finalize();

    f.reward_sum += r.total;
    f.track.push_back(geo::to_geo(s.position, net.projection()));
    res.rewards.emplace(id, r);
    res.terminals.emplace(id, term);
    res.states.emplace(id, s);
    if (term != TerminalState::Active) {
      ended.push_back(id);
      ended_pc[id] = pc;
    }
  }

  for (int id : ended) {
    finish(id, active_.at(id), res.terminals.at(id), ended_pc.at(id));
    active_.erase(id);
  }

  if (clock_ >= cfg_.max_episode_s) {
    for (auto& [id, f] : active_) {
      res.terminals[id] = TerminalState::TimedOut;
      finish(id, f, TerminalState::TimedOut, 0.0);
    }
    active_.clear();
    done_ = true;
  } else {
    spawn_due();
    done_ = active_.empty() && next_flight_ >= schedule_.size();
  }
  res.observations = observe();
  res.time_s = clock_;
  res.done = done_;
  return res;
}

}  // namespace aamcm
