#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mkt/transport_density.hpp"
#include "oracles.hpp"

#include <random>

using namespace mkt;

namespace {

const DistanceField& disk(double R) {
  static const DistanceField f1(ConvexBody::euclidean(), DomainBoundary::circle(1.0));
  static const DistanceField f2(ConvexBody::euclidean(), DomainBoundary::circle(2.0));
  return R == 1.0 ? f1 : f2;
}

}  // namespace

TEST_CASE("growth factor") {
  CHECK(growth_factor(0.0, 3.0) == 3.0);
  CHECK(growth_factor(0.5, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(growth_factor(0.5, 2.0) == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    const double r = 0.1 + 5 * uniform01(rng);
    double t1 = uniform01(rng) / r, t2 = uniform01(rng) / r;
    if (t1 > t2) std::swap(t1, t2);
    if (t1 == t2) continue;
    CHECK(growth_factor(t1, r) > growth_factor(t2, r));
    CHECK(growth_factor(t1, r) == doctest::Approx(oracle::growth_factor_direct(t1, r)).epsilon(1e-12));
    const double t = std::pow(10.0, -10 + 4 * uniform01(rng)) / r;
    CHECK(std::abs(growth_factor_closed(t, r) - growth_factor_series(t, r)) <= 1e-12 * r);
  }
}

TEST_CASE("disk density is |x| / 2") {
  const DistanceField& f = disk(2.0);
  const SourceField one = SourceField::constant(1.0, Region::domain(f.boundary()));
  const DensityValue v = transport_density(f, one, Vec2(1, 0));
  CHECK(v.value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_FALSE(v.singular);
  for (const Vec2& x : {Vec2(0.3, -0.4), Vec2(-1.2, 1.1), Vec2(0, 1.99)})
    CHECK(transport_density(f, one, x).value == doctest::Approx(x.norm() / 2).epsilon(1e-8));

  const DensityValue c = transport_density(f, one, Vec2::Zero());
  CHECK(c.singular);
  CHECK(c.value == 0.0);
}

TEST_CASE("density vanishes off the transport set") {
  const DistanceField& f = disk(2.0);
  // Source on the left half only; rays through the right half never meet it.
  const SourceField left = SourceField::constant(1.0, Region::half_plane(Vec2(1, 0), -0.5));
  CHECK(std::abs(transport_density(f, left, Vec2(1.0, 0.2)).value) <= 1e-8);
  CHECK(transport_density(f, left, Vec2(-1.5, 0)).value > 0.1);

  // Ray from (-1.5, 0) along (1, 0): d = 0.5, tau = 1.5, source on t in [0, 1]:
  // int_0^1 (1 - (0.5 + t) / 2) / (1 - 0.5 / 2) dt = 2/3.
  const double ref = 2.0 / 3.0;
  CHECK(transport_density(f, left, Vec2(-1.5, 0)).value == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("weak identity") {
  const DistanceField& f = disk(1.0);
  const SourceField one = SourceField::constant(1.0, Region::domain(f.boundary()));
  const auto bumps = standard_bumps(f);
  CHECK(bumps.size() == 18u);
  for (const Bump& b : bumps) CHECK(b.inside(f.boundary()));
  const WeakIdentityReport r = verify_weak_identity(f, one, {Bump{Vec2::Zero(), 0.4}}, 1.0 / 128);
  CHECK(r.max_residual <= 1e-3);

  CHECK(verify_weak_identity(f, one, {}, 1.0 / 32).max_residual == 0.0);
  const WeakIdentityReport z = verify_weak_identity(f, SourceField::zero(), bumps, 1.0 / 32);
  CHECK(z.max_residual == 0.0);
  const GridFunction vz = transport_density_grid(f, SourceField::zero(), Grid::with_spacing(f.boundary(), 1.0 / 32));
  for (double v : vz.values) CHECK(v == 0.0);
}

TEST_CASE("density bound") {
  const DistanceField& f = disk(2.0);
  const SourceField one = SourceField::constant(1.0, Region::domain(f.boundary()));
  const DensityBoundReport r = density_bound_check(f, one, 1.0 / 16);
  CHECK(r.passed);
  CHECK(r.bound == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.max_density <= 1.0);
  CHECK(r.max_density == doctest::Approx(1.0).epsilon(2e-2));
  CHECK(r.interior_strict);
  CHECK(r.interior_margin > 0);

  const DensityBoundReport z = density_bound_check(f, SourceField::zero(), 1.0 / 16);
  CHECK(z.passed);
  CHECK(z.max_density == 0.0);
  CHECK(z.bound == 0.0);

  const DensityBoundReport two = density_bound_check(f, one.scaled(2.0), 1.0 / 16);
  CHECK(two.passed);
  CHECK(two.max_density == doctest::Approx(2 * r.max_density).epsilon(1e-9));
  CHECK(two.bound == doctest::Approx(2 * r.bound).epsilon(1e-12));
}
