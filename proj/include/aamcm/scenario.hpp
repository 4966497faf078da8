#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "aamcm/env_config.hpp"
#include "aamcm/hazards.hpp"
#include "aamcm/network.hpp"
#include "aamcm/rng.hpp"
#include "aamcm/vehicle.hpp"

namespace aamcm::scenario {

enum class Curriculum { T1 = 1, T2, T3, T4, T5 };
enum class HazardMode { Training, Evaluation };

Curriculum parse_curriculum(std::string_view name);
std::string_view curriculum_name(Curriculum c) noexcept;

struct ScenarioConfig {
  /// Empty paths select the generated demo network / synthetic population.
  std::filesystem::path network_path;
  std::filesystem::path population_path;

  int fleet_size = 100;
  int max_airborne = 100;
  double departure_window_s = 2.0 * 3600.0;
  double turnaround_s = 60.0;
  double mean_idle_s = 120.0;
  double speed_min_kt = 5.0;
  double speed_max_kt = 65.0;
  int start_hour = 8;

  EnergyConfig energy;

  bool wind_enabled = true;
  double wind_speed_min_kt = 0.0;
  double wind_speed_max_kt = 10.0;

  HazardMode hazard_mode = HazardMode::Training;
  int loss_of_control_count = 1;
  int no_fly_count = 1;
  double hazard_sigma = hazards::kDefaultSigma;

  Curriculum curriculum = Curriculum::T5;
  RewardTerms terms;

  void validate() const;
};

/// Preset for one curriculum task; each task enables a superset of the
/// previous task's hazards and reward terms.
ScenarioConfig curriculum_preset(Curriculum task);
ScenarioConfig curriculum_preset(std::string_view task);

ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

struct ScheduledFlight {
  int flight_id = 0;
  int airframe = 0;
  double departure_time_s = 0.0;
  int origin = 0;
  int destination = 0;
  AircraftModel type = AircraftModel::UamA;
  int lane = 0;
  double initial_speed_kt = 0.0;
  /// Vertex ids from origin to destination along network corridors.
  std::vector<int> plan;
  double estimated_duration_s = 0.0;
};

using TrafficSchedule = std::vector<ScheduledFlight>;

/// Fleet-cycle synthesizer: each airframe repeatedly flies to a uniformly
/// drawn vertiport, turns around, and idles for an exponential time, so
/// departures form a Poisson-like stream and concurrency never exceeds the
/// fleet size. Sorted by departure time.
TrafficSchedule generate_traffic(const ScenarioConfig& cfg, const network::CorridorNetwork& net, Rng& rng);

std::vector<hazards::HazardRegion> place_hazards(const ScenarioConfig& cfg,
                                                 const network::CorridorNetwork& net, Rng& rng);

/// Route node carried by the most vertiport-to-vertiport shortest paths.
int busiest_node(const network::CorridorNetwork& net);

hazards::WindField sample_wind(const ScenarioConfig& cfg, Rng& rng);

/// 29 vertiports around a corridor lattice split by a river with three
/// crossings; deterministic in `seed`.
network::CorridorNetwork generate_demo_network(std::uint64_t seed = 1);

/// Sum of Gaussian districts over the network's extent plus a day/night
/// hourly curve normalized to mean 1.
hazards::PopulationGrid generate_population(const network::CorridorNetwork& net, std::uint64_t seed = 1);

/// Network, population and config bundle shared by episodes.
struct Scenario {
  ScenarioConfig config;
  std::shared_ptr<const network::CorridorNetwork> network;
  std::shared_ptr<const hazards::PopulationGrid> population;
};

/// Loads referenced files, or generates the demo assets when paths are empty.
Scenario materialize(const ScenarioConfig& cfg);

}  // namespace aamcm::scenario
