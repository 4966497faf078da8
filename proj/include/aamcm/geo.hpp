#pragma once

// Local east-north-up frame over a metropolitan operating area.

namespace aamcm::geo {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;
/// Meters per degree of latitude on a spherical earth of mean radius 6371008.8 m.
inline constexpr double kMetersPerDegreeLat = 6371008.8 * kDegToRad;
inline constexpr double kFeetToMeters = 0.3048;
inline constexpr double kKnotsToMps = 1852.0 / 3600.0;

struct GeoPoint {
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees
  double altitude = 0.0;   // meters AGL

  bool operator==(const GeoPoint&) const = default;
};

struct EnuPoint {
  double x = 0.0;  // east, m
  double y = 0.0;  // north, m
  double z = 0.0;  // up, m

  bool operator==(const EnuPoint&) const = default;
};

/// Equirectangular projection about a fixed origin.
class Projection {
 public:
  explicit Projection(const GeoPoint& origin);

  const GeoPoint& origin() const noexcept { return origin_; }
  double meters_per_degree_lat() const noexcept { return m_per_deg_lat_; }
  double meters_per_degree_lon() const noexcept { return m_per_deg_lon_; }

 private:
  GeoPoint origin_;
  double m_per_deg_lat_;
  double m_per_deg_lon_;
};

struct RangeBearing {
  double distance = 0.0;  // horizontal meters
  double bearing = 0.0;   // degrees clockwise from north, [0, 360)
};

void validate(const GeoPoint& p);

EnuPoint to_enu(const GeoPoint& p, const Projection& proj);
GeoPoint to_geo(const EnuPoint& e, const Projection& proj);

RangeBearing range_bearing(const EnuPoint& from, const EnuPoint& to);
double horizontal_distance(const EnuPoint& a, const EnuPoint& b);

/// Dead-reckons `p` along `heading` for `dt` seconds; z is unchanged.
EnuPoint advance(const EnuPoint& p, double heading_deg, double ground_speed, double dt);

/// Wraps to [0, 360).
double wrap_360(double deg);
/// Wraps to (-180, 180].
double wrap_180(double deg);

}  // namespace aamcm::geo
