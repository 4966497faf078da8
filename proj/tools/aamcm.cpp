#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "aamcm/error.hpp"
#include "aamcm/evaluate.hpp"
#include "aamcm/metrics.hpp"
#include "aamcm/protocol.hpp"
#include "aamcm/scenario.hpp"
#include "aamcm/text.hpp"
#include "aamcm/world.hpp"

namespace fs = std::filesystem;
using namespace aamcm;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("aamcm");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("AAMCM_LOG")) {
    spdlog::set_level(spdlog::level::from_str(lvl));
  }
}

std::pair<double, double> parse_range(const std::string& s) {
  const auto parts = text::split(s, ':');
  if (parts.size() == 2) {
    const auto lo = text::parse_double(parts[0]);
    const auto hi = text::parse_double(parts[1]);
    if (lo && hi && *lo >= 0.0 && *lo <= *hi) return {*lo, *hi};
  }
  throw UsageError("expected lo:hi with 0 <= lo <= hi, got '" + s + "'");
}

scenario::ScenarioConfig scenario_from_flags(const std::string& config, const std::string& preset,
                                             const scenario::ScenarioConfig& fallback) {
  if (!config.empty() && !preset.empty()) throw UsageError("--config and --preset are mutually exclusive");
  if (!config.empty()) return scenario::load_scenario(config);
  if (!preset.empty()) {
    auto cfg = scenario::curriculum_preset(preset);
    cfg.hazard_mode = fallback.hazard_mode;
    cfg.no_fly_count = fallback.no_fly_count;
    return cfg;
  }
  return fallback;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

struct EvaluateFlags {
  int days = 10;
  std::vector<std::string> agents;
  std::uint64_t seed = 1;
  std::string energy;
  std::string preset;
  std::string config;
  std::string out = "eval_out";
  int jobs = 1;
};

int cmd_evaluate(const EvaluateFlags& f) {
  EvaluationOptions opts;
  opts.days = f.days;
  opts.seed = f.seed;
  opts.jobs = f.jobs;
  if (!f.agents.empty()) opts.agents = f.agents;
  for (const auto& a : opts.agents) {
    const auto k = agents::parse_policy_kind(a);
    if (!k || *k == agents::PolicyKind::External) {
      throw UsageError("unknown agent '" + a + "' (expected heuristic or unequipped)");
    }
  }
  if (f.days < 1) throw UsageError("--days must be >= 1");
  opts.scenario_config = scenario_from_flags(f.config, f.preset, EvaluationOptions::evaluation_defaults());
  if (!f.energy.empty()) {
    const auto [lo, hi] = parse_range(f.energy);
    opts.scenario_config.energy.energy_min_kwh = lo;
    opts.scenario_config.energy.energy_max_kwh = hi;
  }

  const auto res = run_evaluation(opts);
  const fs::path out(f.out);
  ensure_dir(out);
  metrics::save_csv(res.records, out / "records.csv");
  metrics::save_jsonl(res.records, out / "records.jsonl");
  metrics::save_text(metrics::summary_json(res.summaries), out / "summary.json");

  for (const auto& agent : opts.agents) {
    const auto it = res.summaries.find(agent);
    if (it == res.summaries.end()) continue;
    const auto& s = it->second;
    std::cout << agent << ": flights=" << s.flights << " vertiports_reached=" << s.vertiports_reached.mean;
    if (s.vertiports_ci) std::cout << " +/- " << s.vertiports_reached.halfwidth;
    std::cout << " loss_of_control=" << s.mean[metrics::class_index(TerminalState::LossOfControl)]
              << " out_of_energy=" << s.mean[metrics::class_index(TerminalState::OutOfEnergy)] << '\n';
  }
  return 0;
}

int cmd_serve(bool use_stdio, int port, const std::string& host) {
  if (use_stdio == (port >= 0)) throw UsageError("serve needs exactly one of --stdio or --port");
  if (use_stdio) {
    protocol::serve_stream(std::cin, std::cout);
    return 0;
  }
  if (port > 65535) throw UsageError("--port must be in 0..65535");
  protocol::TcpServer server(static_cast<std::uint16_t>(port), host);
  std::cerr << "listening on " << host << ":" << server.port() << std::endl;
  server.run();
  return 0;
}

struct SimulateFlags {
  std::uint64_t seed = 1;
  std::string preset;
  std::string config;
  std::string agent = "unequipped";
  std::string trace;
  std::string tracks;
  std::string energy;
};

int cmd_simulate(const SimulateFlags& f) {
  auto cfg = scenario_from_flags(f.config, f.preset, scenario::curriculum_preset(scenario::Curriculum::T5));
  if (!f.energy.empty()) {
    const auto [lo, hi] = parse_range(f.energy);
    cfg.energy.energy_min_kwh = lo;
    cfg.energy.energy_max_kwh = hi;
  }
  const auto kind = agents::parse_policy_kind(f.agent);
  if (!kind || *kind == agents::PolicyKind::External) throw UsageError("unknown agent '" + f.agent + "'");
  agents::PolicySpec spec;
  spec.kind = *kind;
  auto policy = agents::make_policy(spec);

  World world(scenario::materialize(cfg));
  world.set_agent_label(f.agent);
  world.reset(f.seed);

  std::ofstream trace;
  if (!f.trace.empty()) {
    trace.open(f.trace, std::ios::binary);
    if (!trace) throw Error(Errc::IoError, "cannot write " + f.trace);
  }
  const auto& proj = world.scenario().network->projection();
  while (!world.done()) {
    const auto res = world.step_with(*policy);
    if (!trace.is_open()) continue;
    for (const auto& [id, r] : res.rewards) {
      const auto& s = res.states.at(id);
      const auto g = geo::to_geo(s.position, proj);
      nlohmann::ordered_json j;
      j["time_s"] = res.time_s;
      j["id"] = id;
      j["lat"] = g.latitude;
      j["lon"] = g.longitude;
      j["alt"] = g.altitude;
      j["x"] = s.position.x;
      j["y"] = s.position.y;
      j["heading"] = s.heading;
      j["airspeed"] = s.airspeed;
      j["energy"] = s.battery.energy_kwh;
      j["action"] = action_code(res.actions.at(id));
      j["reward"] = r.total;
      j["terminal"] = terminal_name(res.terminals.at(id));
      trace << j.dump() << '\n';
    }
  }
  if (trace.is_open()) {
    trace.flush();
    if (!trace) throw Error(Errc::IoError, "write failed: " + f.trace);
  }

  const auto& records = world.records();
  if (!f.tracks.empty()) {
    std::ofstream out(f.tracks, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + f.tracks);
    out << "flight_id,seq,lat,lon,alt\n";
    for (const auto& r : records) {
      for (std::size_t i = 0; i < r.track.size(); ++i) {
        out << r.flight_id << ',' << i << ',' << text::format_double(r.track[i].latitude) << ','
            << text::format_double(r.track[i].longitude) << ',' << text::format_double(r.track[i].altitude) << '\n';
      }
    }
  }
  std::size_t counts[8] = {};
  for (const auto& r : records) ++counts[static_cast<int>(r.terminal)];
  std::cout << "flights=" << records.size();
  for (int t = 1; t < 8; ++t) std::cout << ' ' << terminal_name(static_cast<TerminalState>(t)) << '=' << counts[t];
  std::cout << '\n';
  return 0;
}

int cmd_gen_scenario(const std::string& preset, std::uint64_t seed, const std::string& out_dir) {
  auto cfg = scenario::curriculum_preset(preset.empty() ? "T5" : preset);
  const fs::path out(out_dir);
  ensure_dir(out);
  const auto net = scenario::generate_demo_network(seed);
  const auto pop = scenario::generate_population(net, seed);
  network::save_network(net, out / "network.txt");
  hazards::save_population(pop, out / "population.txt");
  cfg.network_path = "network.txt";
  cfg.population_path = "population.txt";
  scenario::save_scenario(cfg, out / "scenario.cfg");

  // Placement the simulator draws for this seed.
  Rng rng = Rng::derive(seed, 2);
  const auto regions = scenario::place_hazards(cfg, net, rng);
  std::ofstream hz(out / "hazards.csv", std::ios::binary);
  if (!hz) throw Error(Errc::IoError, "cannot write hazards.csv");
  hz << "kind,x,y,sigma\n";
  for (const auto& h : regions) {
    hz << (h.kind == hazards::HazardKind::LossOfControl ? "loss_of_control" : "no_fly") << ','
       << text::format_double(h.center.x) << ',' << text::format_double(h.center.y) << ','
       << text::format_double(h.sigma) << '\n';
  }
  std::cout << "wrote " << (out / "scenario.cfg").string() << " with " << regions.size() << " hazard region(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Contingency management simulator for urban air mobility traffic"};
  app.require_subcommand(1);

  EvaluateFlags ev;
  auto* evaluate = app.add_subcommand("evaluate", "Run agents over simulated days and summarize outcomes");
  evaluate->add_option("--days", ev.days, "Simulated days");
  evaluate->add_option("--agent", ev.agents, "heuristic | unequipped (repeatable)");
  evaluate->add_option("--seed", ev.seed, "Base seed; each day derives its own");
  evaluate->add_option("--energy", ev.energy, "Initial energy range lo:hi in kWh");
  evaluate->add_option("--preset", ev.preset, "Curriculum preset T1..T5");
  evaluate->add_option("--config", ev.config, "Scenario file");
  evaluate->add_option("--out", ev.out, "Output directory");
  evaluate->add_option("--jobs", ev.jobs, "Days simulated in parallel");

  bool use_stdio = false;
  int port = -1;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Speak the line protocol over TCP or stdio");
  serve->add_flag("--stdio", use_stdio, "Use standard input/output");
  serve->add_option("--port", port, "TCP port (0 picks a free one)");
  serve->add_option("--host", host, "Listen address");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Run one seeded episode and dump traces");
  simulate->add_option("--seed", sim.seed, "Seed");
  simulate->add_option("--preset", sim.preset, "Curriculum preset T1..T5");
  simulate->add_option("--config", sim.config, "Scenario file");
  simulate->add_option("--agent", sim.agent, "heuristic | unequipped");
  simulate->add_option("--trace", sim.trace, "JSON lines, one per aircraft per decision step");
  simulate->add_option("--tracks", sim.tracks, "CSV of flown tracks");
  simulate->add_option("--energy", sim.energy, "Initial energy range lo:hi in kWh");

  std::string gen_preset;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "scenario";
  auto* gen = app.add_subcommand("gen-scenario", "Write network, population and scenario files");
  gen->add_option("--preset", gen_preset, "Curriculum preset T1..T5");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*evaluate) return cmd_evaluate(ev);
    if (*serve) return cmd_serve(use_stdio, port, host);
    if (*simulate) return cmd_simulate(sim);
    if (*gen) return cmd_gen_scenario(gen_preset, gen_seed, gen_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::ConfigError ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
