#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mkt/boundary.hpp"
#include "oracles.hpp"

using namespace mkt;

namespace {

Mat2 diag(double a, double b) {
  Mat2 m;
  m << a, 0, 0, b;
  return m;
}

void check_vec(const Vec2& got, const Vec2& want, double tol) {
  CHECK((got - want).norm() <= tol);
}

}  // namespace

TEST_CASE("frames on circle and ellipse") {
  const DomainBoundary c = DomainBoundary::circle(2.0);
  const Frame f = c.frame(0.0);
  check_vec(f.point, {2, 0}, 1e-12);
  check_vec(f.tangent, {0, 1}, 1e-12);
  check_vec(f.normal, {-1, 0}, 1e-12);
  CHECK(c.length() == doctest::Approx(4 * std::numbers::pi).epsilon(1e-12));

  const DomainBoundary e = DomainBoundary::ellipse(2.0, 1.0);
  const Frame g = e.frame_at_param(0.0);
  check_vec(g.point, {2, 0}, 1e-12);
  check_vec(g.normal, {-1, 0}, 1e-12);

  for (const DomainBoundary& b : {c, e, DomainBoundary::polar_curve(1.0, 0.3, 3)}) {
    for (int k = 0; k < 50; ++k) {
      const Frame fr = b.frame(b.length() * k / 50.0);
      CHECK(std::abs(fr.tangent.dot(fr.normal)) <= 1e-12);
      CHECK(fr.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("ellipse length and arclength inverse") {
  const DomainBoundary e = DomainBoundary::ellipse(2.0, 1.0);
  // Perimeter of the (2, 1) ellipse by a fine midpoint rule on |y'(t)|.
  double L = 0;
  const int n = 400000;
  for (int k = 0; k < n; ++k) {
    const double t = kTwoPi * (k + 0.5) / n;
    L += std::hypot(2 * std::sin(t), std::cos(t)) * kTwoPi / n;
  }
  CHECK(e.length() == doctest::Approx(L).epsilon(1e-9));
  for (double s : {0.1, 1.7, 5.0, 9.2}) CHECK(e.arclength_of_param(e.param_of_arclength(s)) == doctest::Approx(s).epsilon(1e-10));
  CHECK(e.contains(Vec2(1.9, 0)));
  CHECK_FALSE(e.contains(Vec2(0, 1.01)));
}

TEST_CASE("cahn-hoffman ray directions") {
  const DomainBoundary c = DomainBoundary::circle(2.0);
  const ConvexBody eu = ConvexBody::euclidean();
  for (double s : {0.0, 1.0, 3.3}) {
    const Vec2 y = c.frame(s).point;
    check_vec(cahn_hoffman(c, eu, s).ray_dir, -y / y.norm(), 1e-12);
  }

  const Mat2 A = diag(1, 4);
  const ConvexBody el = ConvexBody::ellipse(A);
  for (double s : {0.0, 0.7, 2.5, 6.0}) {
    const Vec2 nu = c.frame(s).normal;
    const Vec2 want = A * nu / std::sqrt(nu.dot(A * nu));
    const Vec2 got = cahn_hoffman(c, el, s).ray_dir;
    check_vec(got, want, 1e-12);
    CHECK(oracle::polar_by_sweep([&](const Vec2& u) { return el.gauge(u); }, got) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(got.dot(nu) == doctest::Approx(el.gauge(nu)).epsilon(1e-12));
    CHECK(got.dot(nu) > 0);
  }
}

TEST_CASE("anisotropic curvature") {
  const ConvexBody eu = ConvexBody::euclidean();
  const DomainBoundary c = DomainBoundary::circle(2.0);
  for (double s : {0.0, 2.0, 7.5}) CHECK(anisotropic_curvature(c, eu, s) == doctest::Approx(0.5).epsilon(1e-8));

  const DomainBoundary e = DomainBoundary::ellipse(2.0, 1.0);
  CHECK(anisotropic_curvature(e, eu, 0.0) == doctest::Approx(2.0).epsilon(1e-7));

  const DomainBoundary wavy = DomainBoundary::polar_curve(1.0, 0.3, 3);
  double kmin = 1e300;
  for (int k = 0; k < wavy.sample_count(); ++k) kmin = std::min(kmin, anisotropic_curvature(wavy, eu, wavy.sample_arclength(k)));
  CHECK(kmin < 0);

  // Tangentiality for an elliptic body on a circle.
  const ConvexBody el = ConvexBody::ellipse(diag(1, 4));
  for (int k = 0; k < 64; ++k) {
    const double s = c.length() * k / 64;
    CHECK(std::abs(cahn_hoffman_derivative(c, el, s).dot(c.frame(s).normal)) <= 1e-6);
  }
}

TEST_CASE("minimal mean curvature") {
  const ConvexBody eu = ConvexBody::euclidean();
  CHECK(min_mean_curvature(DomainBoundary::circle(2.0), eu).value == doctest::Approx(0.5).epsilon(1e-8));
  const MinCurvature m = min_mean_curvature(DomainBoundary::ellipse(2.0, 1.0), eu);
  CHECK(m.value == doctest::Approx(0.25).epsilon(1e-8));
  const DomainBoundary e = DomainBoundary::ellipse(2.0, 1.0);
  CHECK(std::abs(std::abs(e.frame(m.arclength).point.y()) - 1.0) <= 1e-6);
  const Mat2 A = diag(1, 4);
  CHECK(min_mean_curvature(DomainBoundary::circle(1.0), ConvexBody::ellipse(A)).value >= -1e-8);
  CHECK(min_mean_curvature(e, ConvexBody::randers(Vec2(0.2, 0.1))).value >= -1e-8);
}

TEST_CASE("ray map and its jacobian") {
  const DomainBoundary c = DomainBoundary::circle(2.0);
  const ConvexBody eu = ConvexBody::euclidean();
  for (double s : {0.0, 1.3, 4.0}) {
    CHECK(ray_point(c, eu, s, 2.0).norm() <= 1e-12);
    check_vec(ray_point(c, eu, s, 0.0), c.frame(s).point, 1e-14);
  }

  const DomainBoundary e = DomainBoundary::ellipse(2.0, 1.0);
  const ConvexBody el = ConvexBody::ellipse(diag(1.5, 1));
  for (const auto& [b, body] : {std::pair{c, el}, std::pair{e, eu}, std::pair{e, el}}) {
    for (int k = 0; k < 16; ++k) {
      const double s = b.length() * (k + 0.25) / 16;
      const double kap = anisotropic_curvature(b, body, s);
      const double t = 0.3 / std::max(std::abs(kap), 0.5);
      const double h = 1e-5;
      const auto dphi = [&](double tt) { return ((ray_point(b, body, s + h, tt) - ray_point(b, body, s - h, tt)) / (2 * h)).norm(); };
      CHECK(dphi(t) == doctest::Approx((1 - t * kap) * dphi(0.0)).epsilon(1e-4));
    }
  }
}

TEST_CASE("invalid boundaries") {
  CHECK_THROWS(DomainBoundary::circle(-1.0));
  CHECK_THROWS(DomainBoundary::ellipse(1.0, 0.0));
  CHECK_THROWS(DomainBoundary::polar_curve(1.0, 1.5, 3));
}
