#include "aamcm/hazards.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "aamcm/error.hpp"
#include "aamcm/text.hpp"
#include "aamcm/vehicle.hpp"

namespace aamcm::hazards {

double hazard_intensity(const HazardRegion& h, const EnuPoint& p) {
  const double dx = p.x - h.center.x;
  const double dy = p.y - h.center.y;
  return std::exp((dx * dx + dy * dy) / (-2.0 * h.sigma * h.sigma));
}

double max_intensity(std::span<const HazardRegion> regions, const EnuPoint& p) {
  double m = 0.0;
  for (const auto& h : regions) m = std::max(m, hazard_intensity(h, p));
  return m;
}

double sample_loss_threshold(Rng& rng, double threshold_sigma) {
  return std::abs(rng.normal(0.0, threshold_sigma));
}

bool no_fly_violation(const HazardRegion& h, const EnuPoint& p, double threshold) {
  if (h.kind != HazardKind::NoFly) {
    throw Error(Errc::WrongHazardKind, "no-fly check on a loss-of-control region");
  }
  return hazard_intensity(h, p) > threshold;
}

WindComponents wind_components(const WindField& w) {
  const double speed = w.speed_kt * geo::kKnotsToMps;
  const double from = w.direction_from_deg * geo::kDegToRad;
  // Air moves toward direction_from + 180.
  return {-speed * std::sin(from), -speed * std::cos(from)};
}

EnuPoint project_impact(const EnuPoint& position, double ground_east, double ground_north) {
  if (!(position.z > 0.0)) throw Error(Errc::AlreadyOnGround, "aircraft altitude must be positive");
  const double t_fall = std::sqrt(2.0 * position.z / kGravity);
  return {position.x + ground_east * t_fall, position.y + ground_north * t_fall, 0.0};
}

EnuPoint project_impact(const AircraftState& state, const WindField& wind) {
  const auto gv = ground_velocity(state, wind);
  return project_impact(state.position, gv.east, gv.north);
}

double PopulationGrid::population_at(const EnuPoint& p, int hour) const {
  const double fx = std::floor((p.x - origin.x) / bin_size);
  const double fy = std::floor((p.y - origin.y) / bin_size);
  if (!(fx >= 0.0 && fy >= 0.0 && fx < nx && fy < ny)) return 0.0;
  const auto idx = static_cast<std::size_t>(fy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(fx);
  const auto h = static_cast<std::size_t>(((hour % 24) + 24) % 24);
  return counts[idx] * hourly_scale[h];
}

void PopulationGrid::validate() const {
  if (nx < 0 || ny < 0) throw Error(Errc::ParseError, "grid dimensions must be non-negative");
  if (counts.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)) {
    throw Error(Errc::ParseError, "grid has " + std::to_string(counts.size()) + " counts, expected " +
                                      std::to_string(static_cast<long long>(nx) * ny));
  }
  if (bin_size != kPopulationBinSize) throw Error(Errc::ParseError, "bin size must be 100 m");
  for (double c : counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw Error(Errc::ParseError, "population counts must be >= 0");
  }
  for (double s : hourly_scale) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error(Errc::ParseError, "hourly multipliers must be >= 0");
  }
}

ImpactAssessment casualty_probability(const PopulationGrid& grid, const EnuPoint& impact, int hour,
                                      double lethal_radius) {
  ImpactAssessment a;
  a.impact_point = impact;
  const double n = grid.population_at(impact, hour);
  const double lethal_area = geo::kPi * lethal_radius * lethal_radius;
  a.population_fraction = std::min(1.0, lethal_area / (grid.bin_size * grid.bin_size));
  a.casualty_probability = 1.0 - std::pow(1.0 - a.population_fraction, n);
  return a;
}

PopulationGrid load_population(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open population file " + path.string());
  PopulationGrid g;
  std::string raw;
  std::size_t line = 0;
  bool header = false;
  bool hourly = false;
  std::vector<double> hours;
  auto fail = [&](const std::string& what) {
    throw Error(Errc::ParseError, path.filename().string() + " line " + std::to_string(line) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line;
    const auto s = text::strip_comment(raw);
    if (s.empty()) continue;
    if (s == "[hourly]") {
      hourly = true;
      continue;
    }
    const auto f = text::split(s, ',');
    if (!header) {
      if (f.size() != 5) fail("expected header x0,y0,bin_size,nx,ny");
      const auto x0 = text::parse_double(f[0]);
      const auto y0 = text::parse_double(f[1]);
      const auto bin = text::parse_double(f[2]);
      const auto nx = text::parse_int(f[3]);
      const auto ny = text::parse_int(f[4]);
      if (!x0 || !y0 || !bin || !nx || !ny) fail("malformed header");
      g.origin = {*x0, *y0, 0.0};
      g.bin_size = *bin;
      g.nx = static_cast<int>(*nx);
      g.ny = static_cast<int>(*ny);
      g.counts.reserve(static_cast<std::size_t>(std::max(0, g.nx)) * static_cast<std::size_t>(std::max(0, g.ny)));
      header = true;
      continue;
    }
    auto& dst = hourly ? hours : g.counts;
    for (const auto& v : f) {
      const auto d = text::parse_double(v);
      if (!d) fail("invalid number '" + std::string(v) + "'");
      dst.push_back(*d);
    }
  }
  if (!header) throw Error(Errc::ParseError, "population file has no header");
  if (hourly) {
    if (hours.size() != 24) throw Error(Errc::ParseError, "[hourly] must have 24 multipliers");
    std::copy(hours.begin(), hours.end(), g.hourly_scale.begin());
  }
  g.validate();
  return g;
}

void save_population(const PopulationGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write population file " + path.string());
  using text::format_double;
  out << "# x0,y0,bin_size,nx,ny\n"
      << format_double(grid.origin.x) << ',' << format_double(grid.origin.y) << ','
      << format_double(grid.bin_size) << ',' << grid.nx << ',' << grid.ny << '\n';
  for (int row = 0; row < grid.ny; ++row) {
    for (int col = 0; col < grid.nx; ++col) {
      if (col) out << ',';
      out << format_double(grid.counts[static_cast<std::size_t>(row) * grid.nx + col]);
    }
    out << '\n';
  }
  out << "[hourly]\n";
  for (std::size_t h = 0; h < 24; ++h) {
    if (h) out << ',';
    out << format_double(grid.hourly_scale[h]);
  }
  out << '\n';
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

}  // namespace aamcm::hazards
