// One line per acceptance criterion; exit status is the number of failures.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "aamcm/agents.hpp"
#include "aamcm/error.hpp"
#include "aamcm/evaluate.hpp"
#include "aamcm/protocol.hpp"
#include "aamcm/rewards.hpp"
#include "aamcm/world.hpp"
#include "oracles.hpp"

using namespace aamcm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Checker {
  Outcome out;
  void expect(bool cond, const std::string& what) {
    if (!cond && out.ok) {
      out.ok = false;
      out.detail = what;
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream ss;
    ss.precision(17);
    ss << what << ": got " << got << ", want " << want << " +/- " << tol;
    expect(std::abs(got - want) <= tol, ss.str());
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome reward_terms() {
  const auto t0 = Clock::now();
  Checker c;
  using namespace rewards;
  const double tol = 1e-12;
  const EnvConfig cfg;
  c.near(reward_energy(0.0), -2.0, tol, "depleted");
  c.near(reward_energy(50.0), -0.0015, tol, "low energy");
  c.near(reward_energy(90.0), 0.0, tol, "energy at threshold");
  c.near(reward_hazard(500.0, 0.9, 0.3), -0.24, tol, "hazard above threshold");
  c.near(reward_hazard(500.0, 0.1, 0.3), -0.12, tol, "hazard within gate");
  c.near(reward_hazard(1500.0, 0.9, 0.3), 0.0, tol, "hazard outside gate");
  c.near(reward_vertiport(TerminalState::ReachedDestination, 50, 6, 3, 0), 1.0, tol, "destination");
  c.near(reward_vertiport(TerminalState::ReachedAlternate, 50, 6, 3, 0), 0.5, tol, "alternate");
  for (double e : {100.0, 37.5, 249.0}) {
    c.near(reward_vertiport(TerminalState::ReturnedToDeparture, e, 6.0, 1.0, 0.0), -e / 1000.0, tol,
           "return with a safe direct option");
  }
  c.near(reward_vertiport(TerminalState::ReturnedToDeparture, 100, 6, 1, 0.01), 0.5, tol, "return, risky direct");
  c.near(reward_vertiport(TerminalState::ReturnedToDeparture, 10, 6, 60, 0), 0.5, tol, "return, out of range");
  c.near(reward_step_shaping(0.0, cfg), 1e-4, tol, "shaping at destination");
  c.near(reward_step_shaping(cfg.d_max, cfg), 1e-4 * std::exp(-4.0), tol, "shaping at d_max");
  c.near(reward_step_shaping(2 * cfg.d_max, cfg), 1e-4 * std::exp(-4.0), tol, "shaping beyond d_max");
  for (auto a : kHeadingActions) c.near(reward_action(a), -0.001, tol, "heading change");
  c.near(reward_action(Action::NoAction), 0.0, tol, "no action");
  c.near(reward_action(Action::UseAssignedRoute), 0.0, tol, "assigned route");
  c.near(reward_population(1e-3, 1.0), -std::log(2.0) / std::log(1001.0), tol, "population");
  c.near(reward_population(1.0, 1.0), -1.0, tol, "population max");
  const double dt = seconds_since(t0);
  c.expect(dt < 1.0, "runtime");
  if (c.out.ok) c.out.detail = fmt("all constants within 1e-12, %.3f s", dt);
  return c.out;
}

Outcome hazard_field() {
  const auto t0 = Clock::now();
  Checker c;
  const hazards::HazardRegion h{{0, 0, 0}, 269.023, hazards::HazardKind::LossOfControl};
  const double center = hazards::hazard_intensity(h, {0, 0, 0});
  const double one_sigma = hazards::hazard_intensity(h, {269.023, 0, 0});
  const double km = hazards::hazard_intensity(h, {0, 1000, 0});
  c.near(center, 1.0, 0.0, "center");
  c.near(one_sigma, 0.60653, 5e-6, "one sigma");
  c.near(km, 9.99e-4, 1e-6, "1000 m");
  const double dt = seconds_since(t0);
  c.expect(dt < 1.0, "runtime");
  if (c.out.ok) c.out.detail = fmt("center %.5f, 1 sigma %.5f, 1000 m %.4g", center, one_sigma, km);
  return c.out;
}

Outcome monte_carlo() {
  const auto t0 = Clock::now();
  Checker c;
  const int n = 100000;
  const hazards::HazardRegion h{{0, 0, 0}, 269.023, hazards::HazardKind::LossOfControl};
  // Point where the field equals 0.26903.
  const double r = 269.023 * std::sqrt(-2.0 * std::log(0.26903));
  const double at_center = hazards::hazard_intensity(h, {0, 0, 0});
  const double at_r = hazards::hazard_intensity(h, {r, 0, 0});
  Rng rng = Rng::derive(2024, 1);
  int hit_center = 0, hit_r = 0;
  for (int i = 0; i < n; ++i) hit_center += at_center > hazards::sample_loss_threshold(rng);
  for (int i = 0; i < n; ++i) hit_r += at_r > hazards::sample_loss_threshold(rng);
  const double p0 = hit_center / double(n);
  const double p1 = hit_r / double(n);
  c.near(p0, 0.9998, 0.0005, "termination at center");
  c.near(p1, 0.6827, 0.01, "termination at intensity 0.26903");
  const double dt = seconds_since(t0);
  c.expect(dt < 10.0, "runtime");
  if (c.out.ok) c.out.detail = fmt("P(center) %.5f, P(0.26903) %.4f, %.2f s", p0, p1, dt);
  return c.out;
}

Outcome observation_shape() {
  Checker c;
  const auto sc = scenario::materialize(scenario::curriculum_preset(scenario::Curriculum::T5));
  auto sizes = [&](const EnvConfig& env) {
    World w(sc, env);
    auto obs = w.reset(3);
    agents::UnequippedPolicy p;
    while (obs.empty()) obs = w.step_with(p).observations;
    std::set<std::size_t> s;
    for (const auto& [id, o] : obs) s.insert(o.size());
    return s;
  };
  c.expect(sizes(EnvConfig{}) == std::set<std::size_t>{128}, "default observation is not 128 long");
  Rng rng(77);
  for (int i = 0; i < 20; ++i) {
    EnvConfig env;
    env.n_waypoints = 1 + static_cast<int>(rng.uniform_index(8));
    env.n_probes = 3 + static_cast<int>(rng.uniform_index(60));
    env.n_vertiports = 1 + static_cast<int>(rng.uniform_index(50));
    const std::size_t want = (9 + 4 * env.n_waypoints) + (3 + env.n_probes + 1) + 3 * env.n_vertiports;
    c.expect(sizes(env) == std::set<std::size_t>{want}, "perturbed config " + std::to_string(i));
  }
  if (c.out.ok) c.out.detail = "128 by default, formula holds for 20 perturbed configs";
  return c.out;
}

Outcome routing_oracle() {
  const auto t0 = Clock::now();
  Checker c;
  Rng rng(2718);
  int pairs = 0, reroutes = 0, infeasible = 0;
  for (int t = 0; t < 200 && c.out.ok; ++t) {
    auto g = oracle::random_graph(rng);
    const auto net = oracle::to_network(g);
    for (std::size_t s = 0; s < g.pos.size(); ++s) {
      if (g.is_vertiport[s]) continue;
      for (std::size_t v = 0; v < g.pos.size(); ++v) {
        if (!g.is_vertiport[v]) continue;
        const auto best = oracle::shortest_by_enumeration(g, static_cast<int>(s), static_cast<int>(v));
        ++pairs;
        if (!std::isfinite(best.length)) {
          bool threw = false;
          try {
            network::dijkstra(net, g.ids[s], g.ids[v], g.hazards);
          } catch (const Error&) {
            threw = true;
          }
          c.expect(threw, "dijkstra found a path the oracle did not");
          continue;
        }
        const auto res = network::dijkstra(net, g.ids[s], g.ids[v], g.hazards);
        c.expect(std::abs(res.length - best.length) <= 1e-9 * best.length, "dijkstra length, graph " + std::to_string(t));
      }
    }
    // Heuristic reroute from the nearest node of a random point.
    const geo::EnuPoint pos{rng.uniform(-4000, 4000), rng.uniform(-4000, 4000), 0};
    int start = -1;
    double bd = INFINITY;
    for (std::size_t i = 0; i < g.pos.size(); ++i) {
      if (g.is_vertiport[i]) continue;
      const double d = std::hypot(pos.x - g.pos[i].x, pos.y - g.pos[i].y);
      if (d < bd) bd = d, start = static_cast<int>(i);
    }
    double want = INFINITY;
    for (std::size_t v = 0; v < g.pos.size(); ++v) {
      if (!g.is_vertiport[v]) continue;
      const auto e = oracle::shortest_by_enumeration(g, start, static_cast<int>(v));
      if (!std::isfinite(e.length)) continue;
      std::vector<geo::EnuPoint> pts;
      for (int i : e.path) pts.push_back(g.pos[static_cast<std::size_t>(i)]);
      if (oracle::polyline_risk(pts, g.hazards) <= 0.2) want = std::min(want, e.length);
    }
    const auto got = agents::reroute_in_network(pos, net, g.hazards, 0.2);
    ++reroutes;
    c.expect(got.has_value() == std::isfinite(want), "reroute feasibility, graph " + std::to_string(t));
    if (got && std::isfinite(want)) {
      c.expect(std::abs(got->total_length - want) <= 1e-9 * want, "reroute length, graph " + std::to_string(t));
    } else if (!got) {
      ++infeasible;
    }
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 30.0, "runtime");
  if (c.out.ok) {
    c.out.detail = fmt("%.0f shortest paths and %.0f reroutes match enumeration, %.2f s", pairs, reroutes, dt) +
                   " (" + std::to_string(infeasible) + " with no feasible vertiport)";
  }
  return c.out;
}

Outcome evaluation_ordering() {
  const auto t0 = Clock::now();
  Checker c;
  EvaluationOptions opts;
  opts.days = 10;
  opts.agents = {"heuristic", "unequipped"};
  opts.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  c.expect(opts.scenario_config.energy.energy_min_kwh == 20.0 && opts.scenario_config.energy.energy_max_kwh == 250.0,
           "energy band");
  c.expect(opts.scenario_config.hazard_mode == scenario::HazardMode::Evaluation, "hazard mode");
  const auto res = run_evaluation(opts);
  const auto& h = res.summaries.at("heuristic");
  const auto& u = res.summaries.at("unequipped");
  const std::size_t loc = metrics::class_index(TerminalState::LossOfControl);
  const double sep = h.vertiports_reached.mean - u.vertiports_reached.mean;
  c.expect(res.peak_airborne <= 100, "more than 100 aircraft airborne");
  c.expect(sep >= 0.10, fmt("separation %.4f below 0.10", sep));
  c.expect(u.mean[loc] > h.mean[loc], fmt("loss of control: unequipped %.4f vs heuristic %.4f", u.mean[loc], h.mean[loc]));
  const double dt = seconds_since(t0);
  c.expect(dt < 600.0, "runtime");
  if (c.out.ok) {
    c.out.detail = fmt("vertiports reached %.1f%% vs %.1f%%", 100 * h.vertiports_reached.mean,
                       100 * u.vertiports_reached.mean) +
                   fmt(", loss of control %.1f%% vs %.1f%%", 100 * h.mean[loc], 100 * u.mean[loc]) +
                   fmt(", peak airborne %.0f, %.1f s", static_cast<double>(res.peak_airborne), dt);
  }
  return c.out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AAMCM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// Feeds each "> " line to a fresh session and compares with the "< " line after it.
bool replay(const fs::path& file, std::string& why) {
  std::ifstream in(file, std::ios::binary);
  protocol::Session session;
  std::string line, expected;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.rfind("> ", 0) != 0) {
      why = file.filename().string() + ": stray line";
      return false;
    }
    if (!std::getline(in, expected) || expected.rfind("< ", 0) != 0) {
      why = file.filename().string() + ": request without response";
      return false;
    }
    ++n;
    if (session.handle_line(line.substr(2)) != expected.substr(2)) {
      why = file.filename().string() + ": response " + std::to_string(n) + " differs";
      return false;
    }
  }
  return n > 0 || (why = file.filename().string() + ": empty", false);
}

Outcome determinism() {
  Checker c;
  const auto base = fs::temp_directory_path() / ("aamcm_accept_" + std::to_string(::getpid()));
  fs::create_directories(base);
  const auto a = base / "a";
  const auto b = base / "b";
  c.expect(run_cli("evaluate --seed 7 --jobs 1 --out " + a.string()) == 0, "first evaluate run failed");
  c.expect(run_cli("evaluate --seed 7 --jobs 4 --out " + b.string()) == 0, "second evaluate run failed");
  std::size_t bytes = 0;
  for (const char* f : {"records.csv", "records.jsonl", "summary.json"}) {
    const auto x = slurp(a / f);
    c.expect(!x.empty() && x == slurp(b / f), std::string(f) + " differs between runs");
    bytes += x.size();
  }
  fs::remove_all(base);

  const fs::path golden = AAMCM_GOLDEN_DIR;
  const auto cwd = fs::current_path();
  fs::current_path(golden);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(golden)) {
    if (e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  c.expect(!files.empty(), "no golden transcripts");
  for (const auto& f : files) {
    std::string why;
    c.expect(replay(f, why), why);
  }
  fs::current_path(cwd);
  if (c.out.ok) {
    c.out.detail = std::to_string(bytes) + " record bytes identical across runs; " + std::to_string(files.size()) +
                   " transcripts replay byte-identically";
  }
  return c.out;
}

Outcome conservation() {
  Checker c;
  const auto cfg = EvaluationOptions::evaluation_defaults();
  const auto sc = scenario::materialize(cfg);
  std::size_t flights = 0;
  std::vector<metrics::FlightRecord> records;
  for (int day = 0; day < 2; ++day) {
    for (const std::string agent : {"heuristic", "unequipped"}) {
      auto policy = agents::make_policy({*agents::parse_policy_kind(agent), 0.2});
      World w(sc);
      w.set_agent_label(agent);
      w.reset(day_seed(11, day), day);
      std::map<int, double> energy;
      std::map<int, int> terminal_count;
      while (!w.done()) {
        const auto r = w.step_with(*policy);
        for (const auto& [id, st] : r.states) {
          const auto it = energy.find(id);
          if (it != energy.end()) c.expect(st.battery.energy_kwh <= it->second, "energy increased");
          energy[id] = st.battery.energy_kwh;
        }
        for (const auto& [id, t] : r.terminals) {
          if (t != TerminalState::Active) ++terminal_count[id];
        }
      }
      c.expect(w.records().size() == w.departures(), "records do not match departures");
      for (const auto& [id, n] : terminal_count) c.expect(n == 1, "flight with more than one terminal");
      c.expect(terminal_count.size() == w.departures(), "flight without a terminal");
      flights += w.departures();
      records.insert(records.end(), w.records().begin(), w.records().end());
    }
  }
  for (const auto& [agent, s] : metrics::summarize_by_agent(records, 11)) {
    for (const auto& f : s.day_fractions) {
      c.near(std::accumulate(f.begin(), f.end(), 0.0), 1.0, 1e-12, agent + " day fractions");
    }
  }
  if (c.out.ok) c.out.detail = std::to_string(flights) + " flights: monotone energy, one terminal each, fractions sum to 1";
  return c.out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"reward-terms", reward_terms},
      {"hazard-field", hazard_field},
      {"loss-of-control-monte-carlo", monte_carlo},
      {"observation-shape", observation_shape},
      {"routing-oracle", routing_oracle},
      {"evaluation-ordering", evaluation_ordering},
      {"determinism", determinism},
      {"conservation", conservation},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %-28s %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.ok;
  }
  return failed;
}
