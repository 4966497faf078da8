#include "aamcm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "aamcm/error.hpp"
#include "aamcm/text.hpp"

namespace aamcm::scenario {

using network::CorridorNetwork;

Curriculum parse_curriculum(std::string_view name) {
  if (name.size() == 2 && (name[0] == 'T' || name[0] == 't') && name[1] >= '1' && name[1] <= '5') {
    return static_cast<Curriculum>(name[1] - '0');
  }
  throw Error(Errc::ConfigError, "unknown curriculum task '" + std::string(name) + "' (expected T1..T5)");
}

std::string_view curriculum_name(Curriculum c) noexcept {
  switch (c) {
    case Curriculum::T1: return "T1";
    case Curriculum::T2: return "T2";
    case Curriculum::T3: return "T3";
    case Curriculum::T4: return "T4";
    case Curriculum::T5: return "T5";
  }
  return "T?";
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::ConfigError, what); };
  if (fleet_size < 1) fail("fleet_size must be >= 1");
  if (max_airborne < 1) fail("max_airborne must be >= 1");
  if (!(departure_window_s > 0.0)) fail("departure_window_s must be positive");
  if (turnaround_s < 0.0 || mean_idle_s < 0.0) fail("turnaround and idle times must be >= 0");
  if (!(speed_min_kt <= speed_max_kt) || speed_min_kt < 0.0) fail("speed interval is empty");
  if (!(energy.energy_min_kwh <= energy.energy_max_kwh) || energy.energy_min_kwh < 0.0) {
    fail("energy interval is empty");
  }
  if (!(energy.consumption_rate > 0.0)) fail("consumption_rate must be positive");
  if (!(energy.cycle_factor_min >= 1.0 && energy.cycle_factor_min <= energy.cycle_factor_max)) {
    fail("cycle factor interval must be nonempty and >= 1");
  }
  if (!(energy.failure_probability >= 0.0 && energy.failure_probability <= 1.0)) {
    fail("failure_probability must be in [0,1]");
  }
  if (!(wind_speed_min_kt <= wind_speed_max_kt) || wind_speed_min_kt < 0.0) fail("wind interval is empty");
  if (loss_of_control_count < 0 || no_fly_count < 0) fail("hazard counts must be >= 0");
  if (!(hazard_sigma > 0.0)) fail("hazard sigma must be positive");
  if (start_hour < 0 || start_hour > 23) fail("start_hour must be in 0..23");
}

ScenarioConfig curriculum_preset(Curriculum task) {
  ScenarioConfig cfg;
  cfg.curriculum = task;
  const int k = static_cast<int>(task);
  cfg.terms.energy = k >= 2;
  cfg.terms.hazard = k >= 3;
  cfg.wind_enabled = k >= 4;
  cfg.terms.population = k >= 5;
  return cfg;
}

ScenarioConfig curriculum_preset(std::string_view task) { return curriculum_preset(parse_curriculum(task)); }

// ---------------------------------------------------------------------------
// Config file

namespace {

struct Entry {
  std::string value;
  std::size_t line;
};

bool parse_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw Error(Errc::ConfigError, "line " + std::to_string(e.line) + ": " + key + " expects a boolean");
}

double parse_num(const Entry& e, const std::string& key) {
  const auto v = text::parse_double(e.value);
  if (!v) throw Error(Errc::ConfigError, "line " + std::to_string(e.line) + ": " + key + " expects a number");
  return *v;
}

int parse_count(const Entry& e, const std::string& key) {
  const auto v = text::parse_int(e.value);
  if (!v) throw Error(Errc::ConfigError, "line " + std::to_string(e.line) + ": " + key + " expects an integer");
  return static_cast<int>(*v);
}

}  // namespace

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open scenario file " + path.string());

  std::map<std::string, Entry> entries;  // "section.key"
  std::string section;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto s = text::strip_comment(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw Error(Errc::ConfigError, "line " + std::to_string(line) + ": bad section header");
      section = std::string(s.substr(1, s.size() - 2));
      static const std::vector<std::string> known = {"traffic", "hazards", "wind", "energy", "curriculum"};
      if (std::find(known.begin(), known.end(), section) == known.end()) {
        throw Error(Errc::ConfigError, "line " + std::to_string(line) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::ConfigError, "line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = (section.empty() ? "" : section + ".") + std::string(text::trim(s.substr(0, eq)));
    entries[key] = {std::string(text::trim(s.substr(eq + 1))), line};
  }

  ScenarioConfig cfg;
  if (const auto it = entries.find("curriculum.task"); it != entries.end()) {
    cfg = curriculum_preset(it->second.value);
    entries.erase(it);
  }
  const auto base = path.parent_path();
  for (const auto& [key, e] : entries) {
    auto file = [&] {
      std::filesystem::path p(e.value);
      return p.is_relative() ? base / p : p;
    };
    if (key == "network") cfg.network_path = file();
    else if (key == "population") cfg.population_path = file();
    else if (key == "traffic.fleet_size") cfg.fleet_size = parse_count(e, key);
    else if (key == "traffic.max_airborne") cfg.max_airborne = parse_count(e, key);
    else if (key == "traffic.departure_window_s") cfg.departure_window_s = parse_num(e, key);
    else if (key == "traffic.turnaround_s") cfg.turnaround_s = parse_num(e, key);
    else if (key == "traffic.mean_idle_s") cfg.mean_idle_s = parse_num(e, key);
    else if (key == "traffic.speed_min_kt") cfg.speed_min_kt = parse_num(e, key);
    else if (key == "traffic.speed_max_kt") cfg.speed_max_kt = parse_num(e, key);
    else if (key == "traffic.start_hour") cfg.start_hour = parse_count(e, key);
    else if (key == "hazards.mode") {
      if (e.value == "training") cfg.hazard_mode = HazardMode::Training;
      else if (e.value == "evaluation") cfg.hazard_mode = HazardMode::Evaluation;
      else throw Error(Errc::ConfigError, "line " + std::to_string(e.line) + ": hazards.mode must be training|evaluation");
    }
    else if (key == "hazards.loss_of_control") cfg.loss_of_control_count = parse_count(e, key);
    else if (key == "hazards.no_fly") cfg.no_fly_count = parse_count(e, key);
    else if (key == "hazards.sigma") cfg.hazard_sigma = parse_num(e, key);
    else if (key == "wind.enabled") cfg.wind_enabled = parse_bool(e, key);
    else if (key == "wind.speed_min_kt") cfg.wind_speed_min_kt = parse_num(e, key);
    else if (key == "wind.speed_max_kt") cfg.wind_speed_max_kt = parse_num(e, key);
    else if (key == "energy.min_kwh") cfg.energy.energy_min_kwh = parse_num(e, key);
    else if (key == "energy.max_kwh") cfg.energy.energy_max_kwh = parse_num(e, key);
    else if (key == "energy.consumption_rate") cfg.energy.consumption_rate = parse_num(e, key);
    else if (key == "energy.cycle_factor_min") cfg.energy.cycle_factor_min = parse_num(e, key);
    else if (key == "energy.cycle_factor_max") cfg.energy.cycle_factor_max = parse_num(e, key);
    else if (key == "energy.failure_probability") cfg.energy.failure_probability = parse_num(e, key);
    else if (key == "curriculum.energy_terms") cfg.terms.energy = parse_bool(e, key);
    else if (key == "curriculum.hazard_terms") cfg.terms.hazard = parse_bool(e, key);
    else if (key == "curriculum.population_terms") cfg.terms.population = parse_bool(e, key);
    else throw Error(Errc::ConfigError, "line " + std::to_string(e.line) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write scenario file " + path.string());
  using text::format_double;
  auto b = [](bool v) { return v ? "true" : "false"; };
  out << "# scenario configuration\n";
  if (!cfg.network_path.empty()) out << "network = " << cfg.network_path.generic_string() << '\n';
  if (!cfg.population_path.empty()) out << "population = " << cfg.population_path.generic_string() << '\n';
  out << "\n[traffic]\n"
      << "fleet_size = " << cfg.fleet_size << '\n'
      << "max_airborne = " << cfg.max_airborne << '\n'
      << "departure_window_s = " << format_double(cfg.departure_window_s) << '\n'
      << "turnaround_s = " << format_double(cfg.turnaround_s) << '\n'
      << "mean_idle_s = " << format_double(cfg.mean_idle_s) << '\n'
      << "speed_min_kt = " << format_double(cfg.speed_min_kt) << '\n'
      << "speed_max_kt = " << format_double(cfg.speed_max_kt) << '\n'
      << "start_hour = " << cfg.start_hour << '\n'
      << "\n[hazards]\n"
      << "mode = " << (cfg.hazard_mode == HazardMode::Training ? "training" : "evaluation") << '\n'
      << "loss_of_control = " << cfg.loss_of_control_count << '\n'
      << "no_fly = " << cfg.no_fly_count << '\n'
      << "sigma = " << format_double(cfg.hazard_sigma) << '\n'
      << "\n[wind]\n"
      << "enabled = " << b(cfg.wind_enabled) << '\n'
      << "speed_min_kt = " << format_double(cfg.wind_speed_min_kt) << '\n'
      << "speed_max_kt = " << format_double(cfg.wind_speed_max_kt) << '\n'
      << "\n[energy]\n"
      << "min_kwh = " << format_double(cfg.energy.energy_min_kwh) << '\n'
      << "max_kwh = " << format_double(cfg.energy.energy_max_kwh) << '\n'
      << "consumption_rate = " << format_double(cfg.energy.consumption_rate) << '\n'
      << "cycle_factor_min = " << format_double(cfg.energy.cycle_factor_min) << '\n'
      << "cycle_factor_max = " << format_double(cfg.energy.cycle_factor_max) << '\n'
      << "failure_probability = " << format_double(cfg.energy.failure_probability) << '\n'
      << "\n[curriculum]\n"
      << "task = " << curriculum_name(cfg.curriculum) << '\n'
      << "energy_terms = " << b(cfg.terms.energy) << '\n'
      << "hazard_terms = " << b(cfg.terms.hazard) << '\n'
      << "population_terms = " << b(cfg.terms.population) << '\n';
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Traffic

TrafficSchedule generate_traffic(const ScenarioConfig& cfg, const CorridorNetwork& net, Rng& rng) {
  cfg.validate();
  const auto& vps = net.vertiports();
  if (vps.size() < 2) throw Error(Errc::ConfigError, "traffic generation needs at least two vertiports");

  // Shortest corridor path between every ordered vertiport pair.
  std::map<std::pair<int, int>, std::pair<std::vector<int>, double>> plans;
  for (const auto& o : vps) {
    const network::ShortestPathTree tree(net, o.id);
    for (const auto& d : vps) {
      if (d.id != o.id && tree.reachable(d.id)) plans[{o.id, d.id}] = {tree.path_to(d.id), tree.distance(d.id)};
    }
  }

  TrafficSchedule flights;
  for (int airframe = 0; airframe < cfg.fleet_size; ++airframe) {
    int at = vps[rng.uniform_index(vps.size())].id;
    double t = rng.exponential(cfg.mean_idle_s);
    while (t < cfg.departure_window_s) {
      std::vector<int> options;
      for (const auto& d : vps) {
        if (plans.contains({at, d.id})) options.push_back(d.id);
      }
      if (options.empty()) break;
      ScheduledFlight f;
      f.airframe = airframe;
      f.departure_time_s = t;
      f.origin = at;
      f.destination = options[rng.uniform_index(options.size())];
      f.type = static_cast<AircraftModel>(rng.uniform_index(kAircraftTypes.size()));
      f.lane = static_cast<int>(rng.uniform_index(network::kLaneCount));
      f.initial_speed_kt = rng.uniform(cfg.speed_min_kt, cfg.speed_max_kt);
      const auto& [path, length] = plans.at({f.origin, f.destination});
      f.plan = path;
      f.estimated_duration_s = length / clamp_airspeed(f.type, f.initial_speed_kt * geo::kKnotsToMps);
      t += f.estimated_duration_s + cfg.turnaround_s + rng.exponential(cfg.mean_idle_s);
      at = f.destination;
      flights.push_back(std::move(f));
    }
  }
  std::stable_sort(flights.begin(), flights.end(), [](const auto& a, const auto& b) {
    return a.departure_time_s < b.departure_time_s;
  });
  for (std::size_t i = 0; i < flights.size(); ++i) flights[i].flight_id = static_cast<int>(i);
  return flights;
}

int busiest_node(const CorridorNetwork& net) {
  std::map<int, long> usage;
  for (const auto& nd : net.nodes()) usage[nd.id] = 0;
  for (const auto& o : net.vertiports()) {
    const network::ShortestPathTree tree(net, o.id);
    for (const auto& d : net.vertiports()) {
      if (d.id == o.id || !tree.reachable(d.id)) continue;
      for (int v : tree.path_to(d.id)) {
        if (!net.is_vertiport(v)) ++usage[v];
      }
    }
  }
  if (usage.empty()) throw Error(Errc::EmptyNetwork, "network has no route nodes");
  int best = usage.begin()->first;
  for (const auto& [id, n] : usage) {
    if (n > usage[best]) best = id;
  }
  return best;
}

std::vector<hazards::HazardRegion> place_hazards(const ScenarioConfig& cfg, const CorridorNetwork& net,
                                                 Rng& rng) {
  std::vector<hazards::HazardRegion> out;
  if (!cfg.terms.hazard) return out;
  if (net.nodes().empty()) throw Error(Errc::EmptyNetwork, "network has no route nodes");
  auto random_node = [&] { return net.nodes()[rng.uniform_index(net.nodes().size())].id; };
  if (cfg.hazard_mode == HazardMode::Training) {
    for (int i = 0; i < cfg.loss_of_control_count; ++i) {
      out.push_back({net.position(random_node()), cfg.hazard_sigma, hazards::HazardKind::LossOfControl});
    }
    for (int i = 0; i < cfg.no_fly_count; ++i) {
      out.push_back({net.position(random_node()), cfg.hazard_sigma, hazards::HazardKind::NoFly});
    }
  } else {
    const auto center = net.position(busiest_node(net));
    for (int i = 0; i < cfg.loss_of_control_count; ++i) {
      out.push_back({center, cfg.hazard_sigma, hazards::HazardKind::LossOfControl});
    }
    // No-fly zones stay seeded so that they vary by day but never move the
    // static loss-of-control field.
    for (int i = 0; i < cfg.no_fly_count; ++i) {
      out.push_back({net.position(random_node()), cfg.hazard_sigma, hazards::HazardKind::NoFly});
    }
  }
  return out;
}

hazards::WindField sample_wind(const ScenarioConfig& cfg, Rng& rng) {
  if (!cfg.wind_enabled) return {};
  hazards::WindField w;
  w.speed_kt = rng.uniform(cfg.wind_speed_min_kt, cfg.wind_speed_max_kt);
  w.direction_from_deg = rng.uniform(0.0, 360.0);
  return w;
}

// ---------------------------------------------------------------------------
// Demo assets

namespace {

constexpr int kLatticeSize = 7;
constexpr double kLatticeSpacing = 4000.0;
constexpr int kNodeIdBase = 100;
constexpr int kDemoVertiports = 29;

double point_segment_distance(const geo::EnuPoint& p, const geo::EnuPoint& a, const geo::EnuPoint& b) {
  const double lx = b.x - a.x, ly = b.y - a.y;
  const double len2 = lx * lx + ly * ly;
  double t = len2 > 0.0 ? ((p.x - a.x) * lx + (p.y - a.y) * ly) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * lx), p.y - (a.y + t * ly));
}

}  // namespace

CorridorNetwork generate_demo_network(std::uint64_t seed) {
  Rng rng = Rng::derive(seed, 0xD3A0);
  const geo::Projection proj(geo::GeoPoint{40.7128, -74.0060, 0.0});
  const double half = 0.5 * (kLatticeSize - 1) * kLatticeSpacing;

  std::vector<geo::EnuPoint> node_pos;
  for (int row = 0; row < kLatticeSize; ++row) {
    for (int col = 0; col < kLatticeSize; ++col) {
      node_pos.push_back({col * kLatticeSpacing - half + rng.uniform(-500.0, 500.0),
                          row * kLatticeSpacing - half + rng.uniform(-500.0, 500.0), 0.0});
    }
  }
  auto node_index = [](int row, int col) { return row * kLatticeSize + col; };

  std::vector<std::pair<int, int>> lattice_edges;
  const int river_col = kLatticeSize / 2 - 1;  // river between this column and the next
  for (int row = 0; row < kLatticeSize; ++row) {
    for (int col = 0; col < kLatticeSize; ++col) {
      if (col + 1 < kLatticeSize) {
        const bool crossing = col == river_col;
        const bool bridge = row == 0 || row == kLatticeSize / 2 || row == kLatticeSize - 1;
        if (!crossing || bridge) lattice_edges.emplace_back(node_index(row, col), node_index(row, col + 1));
      }
      if (row + 1 < kLatticeSize) lattice_edges.emplace_back(node_index(row, col), node_index(row + 1, col));
    }
  }

  // Vertiports: away from corridors and from each other, each tied to its
  // two nearest nodes.
  std::vector<geo::EnuPoint> vp_pos;
  const double extent = half + 2500.0;
  int attempts = 0;
  while (static_cast<int>(vp_pos.size()) < kDemoVertiports) {
    if (++attempts > 200000) throw Error(Errc::ConfigError, "demo vertiport placement did not converge");
    const geo::EnuPoint p{rng.uniform(-extent, extent), rng.uniform(-extent, extent), 0.0};
    bool ok = true;
    for (const auto& [a, b] : lattice_edges) {
      if (point_segment_distance(p, node_pos[a], node_pos[b]) < 900.0) {
        ok = false;
        break;
      }
    }
    for (const auto& q : vp_pos) {
      if (geo::horizontal_distance(p, q) < 2500.0) ok = false;
    }
    if (ok) vp_pos.push_back(p);
  }

  std::vector<network::Vertiport> vps;
  std::vector<network::NetworkNode> nodes;
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < node_pos.size(); ++i) {
    nodes.push_back({kNodeIdBase + static_cast<int>(i), geo::to_geo(node_pos[i], proj)});
  }
  for (const auto& [a, b] : lattice_edges) edges.emplace_back(kNodeIdBase + a, kNodeIdBase + b);
  for (std::size_t i = 0; i < vp_pos.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    vps.push_back({id, geo::to_geo(vp_pos[i], proj), "VP" + std::to_string(id)});
    std::vector<std::pair<double, int>> by_dist;
    for (std::size_t n = 0; n < node_pos.size(); ++n) {
      // Connectors must stay on the vertiport's side of the river.
      const int col = static_cast<int>(n) % kLatticeSize;
      const bool vp_west = vp_pos[i].x < 0.5 * (node_pos[node_index(kLatticeSize / 2, river_col)].x +
                                                node_pos[node_index(kLatticeSize / 2, river_col + 1)].x);
      if ((col <= river_col) != vp_west) continue;
      by_dist.emplace_back(geo::horizontal_distance(vp_pos[i], node_pos[n]), static_cast<int>(n));
    }
    std::sort(by_dist.begin(), by_dist.end());
    for (std::size_t k = 0; k < std::min<std::size_t>(2, by_dist.size()); ++k) {
      edges.emplace_back(id, kNodeIdBase + by_dist[k].second);
    }
  }
  return CorridorNetwork(std::move(vps), std::move(nodes), std::move(edges), network::default_lanes_ft());
}

hazards::PopulationGrid generate_population(const CorridorNetwork& net, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, 0x909);
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  bool first = true;
  auto extend = [&](const geo::EnuPoint& p) {
    if (first) {
      min_x = max_x = p.x;
      min_y = max_y = p.y;
      first = false;
    }
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  };
  for (const auto& v : net.vertiports()) extend(net.position(v.id));
  for (const auto& n : net.nodes()) extend(net.position(n.id));
  const double margin = 3000.0;
  hazards::PopulationGrid g;
  g.bin_size = hazards::kPopulationBinSize;
  g.origin = {std::floor((min_x - margin) / 100.0) * 100.0, std::floor((min_y - margin) / 100.0) * 100.0, 0.0};
  g.nx = static_cast<int>(std::ceil((max_x + margin - g.origin.x) / g.bin_size));
  g.ny = static_cast<int>(std::ceil((max_y + margin - g.origin.y) / g.bin_size));

  struct District {
    double x, y, sigma, peak;
  };
  std::vector<District> districts;
  for (int i = 0; i < 8; ++i) {
    districts.push_back({rng.uniform(min_x, max_x), rng.uniform(min_y, max_y), rng.uniform(1500.0, 4000.0),
                         rng.uniform(40.0, 400.0)});
  }
  g.counts.resize(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny));
  for (int row = 0; row < g.ny; ++row) {
    const double y = g.origin.y + (row + 0.5) * g.bin_size;
    for (int col = 0; col < g.nx; ++col) {
      const double x = g.origin.x + (col + 0.5) * g.bin_size;
      double c = 2.0;  // background density
      for (const auto& d : districts) {
        const double r2 = (x - d.x) * (x - d.x) + (y - d.y) * (y - d.y);
        c += d.peak * std::exp(-r2 / (2.0 * d.sigma * d.sigma));
      }
      g.counts[static_cast<std::size_t>(row) * g.nx + col] = std::round(c);
    }
  }
  double sum = 0.0;
  for (int h = 0; h < 24; ++h) {
    g.hourly_scale[h] = 1.0 + 0.5 * std::cos(2.0 * geo::kPi * (h - 14) / 24.0);
    sum += g.hourly_scale[h];
  }
  for (auto& s : g.hourly_scale) s *= 24.0 / sum;
  return g;
}

Scenario materialize(const ScenarioConfig& cfg) {
  cfg.validate();
  Scenario s;
  s.config = cfg;
  s.network = std::make_shared<const CorridorNetwork>(
      cfg.network_path.empty() ? generate_demo_network() : network::load_network(cfg.network_path));
  if (!cfg.population_path.empty()) {
    s.population = std::make_shared<const hazards::PopulationGrid>(hazards::load_population(cfg.population_path));
  } else {
    s.population = std::make_shared<const hazards::PopulationGrid>(generate_population(*s.network));
  }
  return s;
}

}  // namespace aamcm::scenario
