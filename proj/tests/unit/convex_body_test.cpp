#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mkt/convex_body.hpp"
#include "oracles.hpp"

#include <random>

using namespace mkt;

namespace {

Mat2 diag(double a, double b) {
  Mat2 m;
  m << a, 0, 0, b;
  return m;
}

std::vector<ConvexBody> sample_bodies() {
  Mat2 A;
  A << 2.0, 0.6, 0.6, 1.0;
  return {ConvexBody::euclidean(), ConvexBody::ellipse(diag(1, 4)), ConvexBody::ellipse(A),
          ConvexBody::randers(Vec2(0.3, -0.2))};
}

}  // namespace

TEST_CASE("gauge closed values") {
  CHECK(ConvexBody::euclidean().gauge(Vec2(3, 4)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(ConvexBody::ellipse(diag(1, 4)).gauge(Vec2(0, 1)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("gauge is positively homogeneous") {
  const Vec2 xi0(0.7, -1.3);
  for (const ConvexBody& b : sample_bodies()) {
    CHECK(b.gauge(2.0 * xi0) == doctest::Approx(2.0 * b.gauge(xi0)).epsilon(1e-14));
    CHECK(b.polar_gauge(2.0 * xi0) == doctest::Approx(2.0 * b.polar_gauge(xi0)).epsilon(1e-12));
  }
}

TEST_CASE("polar gauge matches a direction sweep") {
  const ConvexBody e = ConvexBody::ellipse(diag(1, 4));
  const double frozen = 0.5;  // sweep of <x, u> / rho(u) at x = (0, 1)
  CHECK(oracle::polar_by_sweep([&](const Vec2& u) { return e.gauge(u); }, Vec2(0, 1)) ==
        doctest::Approx(frozen).epsilon(1e-9));
  CHECK(e.polar_gauge(Vec2(0, 1)) == doctest::Approx(frozen).epsilon(1e-12));
  CHECK(ConvexBody::euclidean().polar_gauge(Vec2(3, 4)) == doctest::Approx(5.0).epsilon(1e-15));

  for (const ConvexBody& b : sample_bodies()) {
    CHECK(b.polar_gauge(Vec2::Zero()) == 0.0);
    for (const Vec2& x : {Vec2(1, 0), Vec2(-0.4, 0.9), Vec2(0.2, -2.5)}) {
      const double ref = oracle::polar_by_sweep([&](const Vec2& u) { return b.gauge(u); }, x);
      CHECK(b.polar_gauge(x) == doctest::Approx(ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("gauge gradient") {
  const Vec2 g = ConvexBody::euclidean().gauge_gradient(Vec2(3, 4));
  CHECK(g.x() == doctest::Approx(0.6));
  CHECK(g.y() == doctest::Approx(0.8));

  const ConvexBody e = ConvexBody::ellipse(diag(1, 4));
  const Vec2 ge = e.gauge_gradient(Vec2(0, 1));
  CHECK(ge.x() == doctest::Approx(0.0));
  CHECK(ge.y() == doctest::Approx(2.0));
  const double ref = oracle::polar_by_sweep([&](const Vec2& u) { return e.gauge(u); }, ge);
  CHECK(ref == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.polar_gauge(ge) == doctest::Approx(1.0).epsilon(1e-13));

  std::mt19937_64 rng(11);
  for (const ConvexBody& b : sample_bodies()) {
    for (int k = 0; k < 200; ++k) {
      const Vec2 xi = (0.1 + 3 * uniform01(rng)) * unit_direction(kTwoPi * uniform01(rng));
      CHECK(b.gauge_gradient(xi).dot(xi) == doctest::Approx(b.gauge(xi)).epsilon(1e-10));
      CHECK(b.polar_gauge(b.gauge_gradient(xi)) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(b.gauge(b.polar_gauge_gradient(xi)) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(e.gauge_gradient(Vec2::Zero()), DomainError);
  CHECK_THROWS_AS(e.polar_gauge_gradient(Vec2::Zero()), DomainError);
}

TEST_CASE("enclosing constants") {
  // The constants carry a 1e-9 safety margin outward.
  const auto ce = ConvexBody::euclidean().enclosing_constants();
  CHECK(ce.c1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ce.c2 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ce.c1 <= 1.0);
  CHECK(ce.c2 >= 1.0);

  const ConvexBody e = ConvexBody::ellipse(diag(1, 4));
  const auto c = e.enclosing_constants();
  // Direction sweep of rho on the unit circle.
  double lo = 1e300, hi = 0;
  for (int k = 0; k < 100000; ++k) {
    const double v = e.gauge(unit_direction(kTwoPi * k / 100000));
    lo = std::min(lo, v), hi = std::max(hi, v);
  }
  CHECK(c.c1 == doctest::Approx(lo).epsilon(1e-8));
  CHECK(c.c2 == doctest::Approx(hi).epsilon(1e-8));
  CHECK(c.c1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(c.c2 == doctest::Approx(2.0).epsilon(1e-8));

  const auto c3 = e.scaled(3.0).enclosing_constants();
  CHECK(c3.c1 == doctest::Approx(c.c1 / 3).epsilon(1e-14));
  CHECK(c3.c2 == doctest::Approx(c.c2 / 3).epsilon(1e-14));
  CHECK(e.scaled(3.0).gauge(Vec2(0, 3)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("smoothness and curvature validation") {
  const auto eu = ConvexBody::euclidean().validate_c2plus();
  CHECK(eu.passed);
  CHECK(eu.min_curvature == doctest::Approx(1.0).epsilon(1e-6));

  // Level set {rho = 1} of diag(1, 4) is the ellipse with semi-axes 1 and 1/2.
  double kmin = 1e300;
  const int n = 20000;
  const auto pt = [](int k) { const double t = kTwoPi * k / n; return Vec2(std::cos(t), 0.5 * std::sin(t)); };
  for (int k = 0; k < n; ++k) kmin = std::min(kmin, oracle::circumcircle_curvature(pt(k - 1), pt(k), pt(k + 1)));
  const auto el = ConvexBody::ellipse(diag(1, 4)).validate_c2plus();
  CHECK(el.passed);
  CHECK(el.min_curvature == doctest::Approx(kmin).epsilon(1e-4));
  CHECK(kmin == doctest::Approx(0.5).epsilon(1e-6));

  CHECK(ConvexBody::randers(Vec2(0.3, -0.2)).validate_c2plus().passed);

  const auto sq = ConvexBody::max_norm().validate_c2plus();
  CHECK_FALSE(sq.passed);
  CHECK_FALSE(sq.offending_angles.empty());
}

TEST_CASE("invalid bodies") {
  CHECK_THROWS(ConvexBody::ellipse(diag(1, -1)));
  CHECK_THROWS(ConvexBody::randers(Vec2(1.2, 0)));
  CHECK_THROWS(ConvexBody::euclidean().scaled(0.0));
}
