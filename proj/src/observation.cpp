#include "aamcm/observation.hpp"

#include <cmath>

namespace aamcm {

std::vector<geo::EnuPoint> probe_points(const geo::EnuPoint& own, const EnvConfig& cfg) {
  std::vector<geo::EnuPoint> pts;
  pts.reserve(static_cast<std::size_t>(cfg.n_probes) + 1);
  const double step = 360.0 / cfg.n_probes;
  for (int k = 0; k < cfg.n_probes; ++k) {
    const double b = k * step * geo::kDegToRad;
    pts.push_back({own.x + cfg.probe_radius * std::sin(b), own.y + cfg.probe_radius * std::cos(b), own.z});
  }
  pts.push_back(own);
  return pts;
}

std::vector<geo::EnuPoint> upcoming_waypoints(const AircraftState& ac, int n) {
  std::vector<geo::EnuPoint> out;
  const auto& wps = ac.flight_plan.waypoints;
  if (wps.empty()) return std::vector<geo::EnuPoint>(static_cast<std::size_t>(n), ac.position);
  for (int j = 0; j < n; ++j) {
    const std::size_t i = std::min(ac.plan_cursor + static_cast<std::size_t>(j), wps.size() - 1);
    out.push_back(wps[i]);
  }
  return out;
}

double casualty_estimate(const AircraftState& ac, const WorldView& view) {
  if (view.population == nullptr || ac.position.z <= 0.0) return 0.0;
  const auto impact = hazards::project_impact(ac, view.wind);
  return hazards::casualty_probability(*view.population, impact, view.hour, view.cfg->lethal_radius)
      .casualty_probability;
}

Observation assemble_observation(const AircraftState& ac, const WorldView& view) {
  const EnvConfig& cfg = *view.cfg;
  const auto& net = *view.net;
  Observation obs;
  obs.n_waypoints = cfg.n_waypoints;
  obs.n_probes = cfg.n_probes;
  obs.n_vertiports = cfg.n_vertiports;
  auto& v = obs.values;
  v.reserve(cfg.observation_size());

  const auto wind = hazards::wind_components(view.wind);
  const auto& dest = net.position(ac.destination_id);
  auto intensity = [&](const geo::EnuPoint& p) { return hazards::max_intensity(view.hazards, p); };

  v.push_back(ac.heading);
  v.push_back(ac.position.z);
  v.push_back(ac.accel);
  v.push_back(ac.airspeed);
  v.push_back(ac.battery.energy_kwh);
  v.push_back(ac.battery.usage_rate);
  v.push_back(casualty_estimate(ac, view));
  v.push_back(wind.north);
  v.push_back(wind.east);
  for (const auto& w : upcoming_waypoints(ac, cfg.n_waypoints)) {
    v.push_back(w.x - ac.position.x);
    v.push_back(w.y - ac.position.y);
    v.push_back(intensity(w));
    v.push_back(geo::horizontal_distance(w, dest));
  }

  const auto to_dest = geo::range_bearing(ac.position, dest);
  v.push_back(geo::wrap_180(to_dest.bearing - ac.heading));
  v.push_back(to_dest.distance);
  v.push_back(intensity(dest));
  for (const auto& p : probe_points(ac.position, cfg)) v.push_back(intensity(p));

  const auto& vps = net.vertiports();
  for (int i = 0; i < cfg.n_vertiports; ++i) {
    if (static_cast<std::size_t>(i) < vps.size()) {
      const auto& p = net.position(vps[i].id);
      const auto rb = geo::range_bearing(ac.position, p);
      v.push_back(rb.distance);
      v.push_back(geo::wrap_180(rb.bearing - ac.heading));
      v.push_back(intensity(p));
    } else {
      v.insert(v.end(), {0.0, 0.0, 0.0});
    }
  }
  return obs;
}

}  // namespace aamcm
