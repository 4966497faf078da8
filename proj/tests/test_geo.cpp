#include <doctest.h>

#include <cmath>

#include "aamcm/error.hpp"
#include "aamcm/geo.hpp"
#include "aamcm/rng.hpp"

using namespace aamcm;
using namespace aamcm::geo;

namespace {

const GeoPoint kOrigin{40.7128, -74.0060, 30.0};

template <typename F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an aamcm::Error");
  return Errc::BadRequest;
}

}  // namespace

TEST_CASE("projection scale factors") {
  const Projection p(kOrigin);
  CHECK(p.meters_per_degree_lat() == doctest::Approx(6371008.8 * kPi / 180.0));
  CHECK(p.meters_per_degree_lon() == doctest::Approx(p.meters_per_degree_lat() * std::cos(40.7128 * kDegToRad)));
  CHECK(error_code([] { Projection bad(GeoPoint{90.0, 0.0, 0.0}); }) == Errc::InvalidCoordinate);
}

TEST_CASE("to_enu axis cases") {
  const Projection p(kOrigin);
  const auto o = to_enu(kOrigin, p);
  CHECK(o.x == 0.0);
  CHECK(o.y == 0.0);
  CHECK(o.z == 30.0);

  const auto n = to_enu({kOrigin.latitude + 0.01, kOrigin.longitude, 0.0}, p);
  CHECK(n.x == 0.0);
  CHECK(n.y == doctest::Approx(0.01 * p.meters_per_degree_lat()).epsilon(1e-9));

  const auto g = to_geo({p.meters_per_degree_lon() * 0.02, 0.0, 5.0}, p);
  CHECK(g.longitude == doctest::Approx(kOrigin.longitude + 0.02).epsilon(1e-12));
  CHECK(g.latitude == kOrigin.latitude);
  CHECK(g.altitude == 5.0);
}

TEST_CASE("projection round trip within 200 km") {
  const Projection p(kOrigin);
  Rng rng(42);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint q{kOrigin.latitude + rng.uniform(-1.8, 1.8), kOrigin.longitude + rng.uniform(-2.3, 2.3),
                     rng.uniform(0.0, 2000.0)};
    const auto back = to_geo(to_enu(q, p), p);
    worst = std::max({worst, std::abs(back.latitude - q.latitude), std::abs(back.longitude - q.longitude)});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("coordinate validation") {
  const Projection p(kOrigin);
  CHECK(error_code([&] { to_enu({91.0, 0.0, 0.0}, p); }) == Errc::InvalidCoordinate);
  CHECK(error_code([&] { to_enu({0.0, -180.5, 0.0}, p); }) == Errc::InvalidCoordinate);
  CHECK(error_code([&] { to_enu({0.0, 0.0, NAN}, p); }) == Errc::InvalidCoordinate);
  CHECK(error_code([&] { to_geo({INFINITY, 0.0, 0.0}, p); }) == Errc::InvalidCoordinate);
}

TEST_CASE("range and bearing") {
  auto rb = range_bearing({0, 0, 0}, {0, 1000, 0});
  CHECK(rb.distance == 1000.0);
  CHECK(rb.bearing == 0.0);
  rb = range_bearing({0, 0, 0}, {1000, 0, 0});
  CHECK(rb.bearing == doctest::Approx(90.0));
  rb = range_bearing({0, 0, 0}, {1000, 1000, 0});
  CHECK(rb.distance == doctest::Approx(1414.214).epsilon(1e-6));
  CHECK(rb.bearing == doctest::Approx(45.0));
  rb = range_bearing({5, 5, 0}, {5, 5, 100});
  CHECK(rb.distance == 0.0);
  CHECK(rb.bearing == 0.0);

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const EnuPoint a{rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4), 0};
    const EnuPoint b{rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4), 0};
    const double d = wrap_360(range_bearing(a, b).bearing - range_bearing(b, a).bearing);
    CHECK(d == doctest::Approx(180.0).epsilon(1e-9));
  }
}

TEST_CASE("advance dead reckoning") {
  auto p = advance({0, 0, 7}, 0.0, 10.0, 5.0);
  CHECK(p.y == doctest::Approx(50.0));
  CHECK(p.x == doctest::Approx(0.0));
  CHECK(p.z == 7.0);
  p = advance({0, 0, 0}, 90.0, 10.0, 5.0);
  CHECK(p.x == doctest::Approx(50.0));
  p = advance({0, 0, 0}, 180.0, 20.0, 2.5);
  CHECK(p.y == doctest::Approx(-50.0));
  CHECK(error_code([] { advance({0, 0, 0}, 0.0, 1.0, -1.0); }) == Errc::InvalidTimestep);
  CHECK(error_code([] { advance({0, 0, 0}, 0.0, 1.0, 0.0); }) == Errc::InvalidTimestep);

  // Axis-aligned headings with dyadic steps add exactly.
  const auto two = advance(advance({0, 0, 0}, 0.0, 12.5, 1.0), 0.0, 12.5, 3.0);
  const auto one = advance({0, 0, 0}, 0.0, 12.5, 4.0);
  CHECK(two.y == one.y);
}

TEST_CASE("angle wrapping") {
  CHECK(wrap_360(-10.0) == doctest::Approx(350.0));
  CHECK(wrap_360(720.0) == 0.0);
  CHECK(wrap_360(-1e-18) < 360.0);
  CHECK(wrap_180(190.0) == doctest::Approx(-170.0));
  CHECK(wrap_180(180.0) == 180.0);
  CHECK(wrap_180(-180.0) == 180.0);
}
