#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mkt/variational.hpp"
#include "oracles.hpp"

#include <limits>

using namespace mkt;

namespace {

const DistanceField& disk(double R) {
  static const DistanceField f1(ConvexBody::euclidean(), DomainBoundary::circle(1.0));
  static const DistanceField f2(ConvexBody::euclidean(), DomainBoundary::circle(2.0));
  return R == 1.0 ? f1 : f2;
}

SourceField ones(const DistanceField& f) { return SourceField::constant(1.0, Region::domain(f.boundary())); }

}  // namespace

TEST_CASE("growth constants") {
  const ConvexBody eu = ConvexBody::euclidean();
  CHECK(growth_constant(Lagrangian::indicator(), eu).value == std::numeric_limits<double>::infinity());
  CHECK(growth_constant(Lagrangian::hinge(5.0), eu).value == 5.0);
  const auto sq = growth_constant(Lagrangian::radial([](double r) { return std::pow(std::max(r - 1, 0.0), 2); }), eu);
  CHECK_FALSE(sq.exact);
  CHECK(sq.value <= 2 * sq.sampling_floor);
  CHECK(sq.value >= 0.0);
  CHECK_THROWS_AS(growth_constant(Lagrangian::power(2.0), eu), ConfigurationError);
  CHECK_THROWS_AS(Lagrangian::radial([](double r) { return r; }), ConfigurationError);
}

TEST_CASE("existence condition") {
  const DistanceField& f = disk(2.0);
  CHECK(check_h3(Lagrangian::indicator(), ones(f), f).passed);

  const H3Report eq = check_h3(Lagrangian::hinge(1.0), ones(f), f);
  CHECK(eq.H0 == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(eq.inradius == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(eq.c == doctest::Approx(oracle::growth_factor_direct(0.5, 2.0)).epsilon(1e-8));
  CHECK(eq.c == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(eq.passed);
  CHECK(std::abs(eq.margin) <= 1e-6);

  CHECK_FALSE(check_h3(Lagrangian::hinge(0.5), ones(f), f).passed);
}

TEST_CASE("discrete functional") {
  const DistanceField& f = disk(1.0);
  const Grid g = Grid::with_spacing(f.boundary(), 1.0 / 64);
  const GridFunction zero = GridFunction::sample(g, [](const Vec2&) { return 0.0; });
  CHECK(functional_J(zero, Lagrangian::indicator(), SourceField::zero(), f).value == 0.0);

  const GridFunction d = GridFunction::sample(g, [&](const Vec2& x) { return f.value(x); });
  const FunctionalReport J = functional_J(d, Lagrangian::indicator(), ones(f), f);
  // -int_disk (1 - |x|) = -pi / 3.
  CHECK(J.value == doctest::Approx(-std::numbers::pi / 3).epsilon(1e-2));
  CHECK(J.infeasible_nodes == 0u);

  // The source term is linear in f; the Lagrangian part does not depend on f.
  const SourceField f1 = SourceField::constant(1.0, Region::disk(Vec2(0.3, 0), 0.4));
  const SourceField f2 = SourceField::constant(0.5, Region::half_plane(Vec2(0, 1), 0.0));
  const Lagrangian hinge = Lagrangian::hinge(2.0);
  const auto a = functional_J(d, hinge, f1, f), b = functional_J(d, hinge, f2, f), c = functional_J(d, hinge, f1.plus(f2), f);
  CHECK(c.source_part == doctest::Approx(a.source_part + b.source_part).epsilon(1e-12));
  CHECK(c.lagrangian_part == a.lagrangian_part);
  CHECK(c.value == doctest::Approx(a.value + b.value - a.lagrangian_part).epsilon(1e-12));

  GridFunction big = d;
  for (double& v : big.values) v *= 3.0;
  CHECK(functional_J(big, Lagrangian::indicator(), ones(f), f).value == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(functional_J(d, Lagrangian::power(2.0), ones(f), f), ConfigurationError);
}

TEST_CASE("minimality under perturbations") {
  const DistanceField& f = disk(1.0);
  const MinimalityReport m = minimality_test(f, Lagrangian::indicator(), ones(f), 100, 1.0 / 32, 42);
  CHECK(m.violations == 0u);
  CHECK(m.trials.size() >= 100u);
  CHECK(m.uf_matches);

  const MinimalityReport n = minimality_test(f, Lagrangian::indicator(), ones(f), 100, 1.0 / 32, 42);
  REQUIRE(n.trials.size() == m.trials.size());
  for (std::size_t i = 0; i < m.trials.size(); ++i) CHECK(n.trials[i].J == m.trials[i].J);

  // Annular source: u_f and d are both minimizers.
  const SourceField ring = SourceField::constant(1.0, Region::sector(Vec2::Zero(), 0.0, kTwoPi, 0.5, 1.0));
  const MinimalityReport r = minimality_test(f, Lagrangian::indicator(), ring, 10, 1.0 / 32, 1);
  CHECK(r.uf_matches);
  CHECK(std::abs(r.J_uf - r.J_d) <= r.tol_J);

  CHECK_THROWS_AS(minimality_test(disk(2.0), Lagrangian::hinge(0.5), ones(disk(2.0)), 5, 1.0 / 16, 1), ConfigurationError);
}

TEST_CASE("p-Laplace solver") {
  const DistanceField& f = disk(1.0);
  // The masked boundary makes the error first order in h; 2% needs h = 1/128.
  const Grid g = Grid::with_spacing(f.boundary(), 1.0 / 128, 1);
  CHECK(oracle::plaplace_radial(2.0, 1.0, 0.0) == doctest::Approx(0.25).epsilon(1e-15));

  const PLaplaceResult r = plaplace_solve(f, ones(f), 2.0, g);
  double num = 0, den = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.active(k)) continue;
    const double ref = oracle::plaplace_radial(2.0, 1.0, g.node(k).norm());
    num += std::pow(r.u.values[k] - ref, 2), den += ref * ref;
  }
  CHECK(std::sqrt(num / den) <= 2e-2);

  const PLaplaceResult z = plaplace_solve(f, SourceField::zero(), 4.0, g);
  for (double v : z.u.values) CHECK(std::abs(v) <= 1e-12);

  // Energy gradient against central differences.
  GridFunction u = r.u;
  std::vector<double> grad;
  plaplace_energy(f.body(), ones(f), 3.0, u, &grad);
  for (std::size_t k = 0; k < g.size(); k += 397) {
    if (!g.active(k)) continue;
    const double h = 1e-6, v = u.values[k];
    u.values[k] = v + h;
    const double ep = plaplace_energy(f.body(), ones(f), 3.0, u);
    u.values[k] = v - h;
    const double em = plaplace_energy(f.body(), ones(f), 3.0, u);
    u.values[k] = v;
    CHECK(grad[k] == doctest::Approx((ep - em) / (2 * h)).epsilon(1e-5).scale(1e-6));
  }

  PLaplaceOptions acc;
  acc.method = PLaplaceOptions::Method::Accelerated;
  const PLaplaceResult a = plaplace_solve(f, ones(f), 2.0, Grid::with_spacing(f.boundary(), 1.0 / 16, 1), acc);
  const PLaplaceResult n = plaplace_solve(f, ones(f), 2.0, Grid::with_spacing(f.boundary(), 1.0 / 16, 1));
  CHECK(a.energy == doctest::Approx(n.energy).epsilon(1e-6));
}

TEST_CASE("p-Laplace sweeps") {
  const DistanceField& f = disk(1.0);
  const SweepReport one = plaplace_sweep(f, ones(f), {4.0}, 1.0 / 16, true);
  CHECK(one.rows.size() == 1u);
  CHECK_FALSE(one.asserted);

  const SweepReport s = plaplace_sweep(f, ones(f), {2.0, 4.0, 8.0}, 1.0 / 32, true);
  CHECK(s.asserted);
  CHECK(s.monotone);
  CHECK(s.rows[0].sup_error > s.rows[1].sup_error);
  CHECK(s.rows[1].sup_error > s.rows[2].sup_error);

  const SourceField ring = SourceField::constant(1.0, Region::sector(Vec2::Zero(), 0.0, kTwoPi, 0.5, 1.0));
  CHECK_FALSE(plaplace_sweep(f, ring, {2.0, 4.0}, 1.0 / 16, false).asserted);
}
