#include "aamcm/geo.hpp"

#include <cmath>
#include <string>

#include "aamcm/error.hpp"

namespace aamcm::geo {

Projection::Projection(const GeoPoint& origin)
    : origin_(origin),
      m_per_deg_lat_(kMetersPerDegreeLat),
      m_per_deg_lon_(kMetersPerDegreeLat * std::cos(origin.latitude * kDegToRad)) {
  validate(origin);
  if (!(m_per_deg_lon_ > 1e-3)) {
    throw Error(Errc::InvalidCoordinate, "projection origin too close to a pole");
  }
}

void validate(const GeoPoint& p) {
  if (!std::isfinite(p.latitude) || p.latitude < -90.0 || p.latitude > 90.0) {
    throw Error(Errc::InvalidCoordinate, "latitude out of range: " + std::to_string(p.latitude));
  }
  if (!std::isfinite(p.longitude) || p.longitude < -180.0 || p.longitude > 180.0) {
    throw Error(Errc::InvalidCoordinate, "longitude out of range: " + std::to_string(p.longitude));
  }
  if (!std::isfinite(p.altitude)) {
    throw Error(Errc::InvalidCoordinate, "altitude is not finite");
  }
}

EnuPoint to_enu(const GeoPoint& p, const Projection& proj) {
  validate(p);
  return {(p.longitude - proj.origin().longitude) * proj.meters_per_degree_lon(),
          (p.latitude - proj.origin().latitude) * proj.meters_per_degree_lat(), p.altitude};
}

GeoPoint to_geo(const EnuPoint& e, const Projection& proj) {
  if (!std::isfinite(e.x) || !std::isfinite(e.y) || !std::isfinite(e.z)) {
    throw Error(Errc::InvalidCoordinate, "ENU point is not finite");
  }
  return {proj.origin().latitude + e.y / proj.meters_per_degree_lat(),
          proj.origin().longitude + e.x / proj.meters_per_degree_lon(), e.z};
}

double horizontal_distance(const EnuPoint& a, const EnuPoint& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

RangeBearing range_bearing(const EnuPoint& from, const EnuPoint& to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double d = std::hypot(dx, dy);
  if (d == 0.0) return {0.0, 0.0};
  return {d, wrap_360(std::atan2(dx, dy) * kRadToDeg)};
}

EnuPoint advance(const EnuPoint& p, double heading_deg, double ground_speed, double dt) {
  if (!(dt > 0.0)) throw Error(Errc::InvalidTimestep, "dt must be positive");
  const double h = heading_deg * kDegToRad;
  return {p.x + ground_speed * dt * std::sin(h), p.y + ground_speed * dt * std::cos(h), p.z};
}

double wrap_360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod of a tiny negative value can round up to exactly 360.
  if (r >= 360.0) r = 0.0;
  return r;
}

double wrap_180(double deg) {
  double r = wrap_360(deg);
  if (r > 180.0) r -= 360.0;
  return r;
}

}  // namespace aamcm::geo
