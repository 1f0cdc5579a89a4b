#include "mkt/checks.hpp"

#include "mkt/grid.hpp"
#include "mkt/minimizer.hpp"
#include "mkt/transport_density.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mkt {

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

namespace {

class Tally {
 public:
  Tally(std::string name, double tol) { r_.name = std::move(name), r_.tolerance = tol; }
  void add(double defect) {
    ++r_.samples;
    if (!(defect <= r_.tolerance)) ++r_.failures;
    if (std::isnan(defect) || defect > r_.value) r_.value = defect;
  }
  CheckResult result() const { return r_; }

 private:
  CheckResult r_;
};

Vec2 random_vector(std::mt19937_64& rng) {
  const double angle = kTwoPi * uniform01(rng);
  return std::pow(10.0, -3.0 + 6.0 * uniform01(rng)) * unit_direction(angle);
}

Vec2 random_point(const DomainBoundary& b, std::mt19937_64& rng) {
  const BoundingBox bb = b.bounding_box();
  for (;;) {
    const Vec2 x(bb.lo.x() + uniform01(rng) * (bb.hi.x() - bb.lo.x()),
                 bb.lo.y() + uniform01(rng) * (bb.hi.y() - bb.lo.y()));
    if (b.contains(x)) return x;
  }
}

}  // namespace

SuiteResult gauge_suite(const ConvexBody& body, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto [c1, c2] = body.enclosing_constants();
  Tally tri("triangle_rho", 1e-9), tri0("triangle_rho0", 1e-9);
  Tally hom("homogeneity_rho", 1e-9), hom0("homogeneity_rho0", 1e-9);
  Tally on_polar("rho0_of_grad_rho", 1e-8), euler("grad_rho_pairing", 1e-8);
  Tally on_body("rho_of_grad_rho0", 1e-8), euler0("grad_rho0_pairing", 1e-8);
  Tally sandwich("enclosing_constants", 1e-9);
  for (int k = 0; k < samples; ++k) {
    const Vec2 a = random_vector(rng), b = random_vector(rng);
    const double lam = std::pow(10.0, -2.0 + 4.0 * uniform01(rng));
    const double ra = body.gauge(a), rb = body.gauge(b);
    const double pa = body.polar_gauge(a), pb = body.polar_gauge(b);
    tri.add((body.gauge(a + b) - ra - rb) / (ra + rb));
    tri0.add((body.polar_gauge(a + b) - pa - pb) / (pa + pb));
    hom.add(std::abs(body.gauge(lam * a) - lam * ra) / (lam * ra));
    hom0.add(std::abs(body.polar_gauge(lam * a) - lam * pa) / (lam * pa));
    const Vec2 g = body.gauge_gradient(a), g0 = body.polar_gauge_gradient(a);
    on_polar.add(std::abs(body.polar_gauge(g) - 1.0));
    euler.add(std::abs(g.dot(a) - ra) / ra);
    on_body.add(std::abs(body.gauge(g0) - 1.0));
    euler0.add(std::abs(g0.dot(a) - pa) / pa);
    const double n = a.norm();
    sandwich.add(std::max(c1 * n - ra, ra - c2 * n) / n);
  }
  SuiteResult s{"gauge:" + body.name(), {}};
  for (const Tally* t : {&tri, &tri0, &hom, &hom0, &on_polar, &euler, &on_body, &euler0, &sandwich})
    s.checks.push_back(t->result());
  return s;
}

SuiteResult curvature_suite(const DomainBoundary& boundary, const ConvexBody& body, int samples) {
  Tally tangential("tangentiality", 1e-6), jacobian("ray_jacobian", 1e-4), planar("euclidean_curvature", 1e-8);
  const double L = boundary.length();
  const double H0 = min_mean_curvature(boundary, body).value;
  for (int k = 0; k < samples; ++k) {
    const double s = L * k / samples;
    const Frame f = boundary.frame(s);
    const Vec2 dn = cahn_hoffman_derivative(boundary, body, s);
    tangential.add(std::abs(dn.dot(f.normal)));
    const double kappa = anisotropic_curvature(boundary, body, s);
    // Half way to the focal time of the most curved sample keeps 1 - t k away from 0.
    const double t = 0.5 / std::max(H0, std::abs(kappa));
    const double e = 1e-4 * L;
    const Vec2 dray = (ray_point(boundary, body, s + e, t) - ray_point(boundary, body, s - e, t)) / (2 * e);
    jacobian.add(std::abs(dray.dot(f.tangent) - (1.0 - t * kappa)));
    if (body.kind() == BodyKind::Euclidean) planar.add(std::abs(kappa - boundary.euclidean_curvature(s)));
  }
  SuiteResult r{"curvature", {tangential.result(), jacobian.result()}};
  if (body.kind() == BodyKind::Euclidean) r.checks.push_back(planar.result());
  return r;
}

SuiteResult growth_factor_suite(double r, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tally origin("value_at_zero", 0.0), decrease("strict_decrease", 0.0), branches("branch_agreement", 1e-12);
  origin.add(std::abs(growth_factor(0.0, r) - r));
  for (int k = 0; k < samples; ++k) {
    double t1 = uniform01(rng) / r, t2 = uniform01(rng) / r;
    if (t1 > t2) std::swap(t1, t2);
    if (t1 == t2) continue;
    // Defect is how far c(t2) fails to lie strictly below c(t1).
    const double c1 = growth_factor(t1, r), c2 = growth_factor(t2, r);
    decrease.add(c2 < c1 ? 0.0 : c2 - c1 + 1.0);
    const double t = std::pow(10.0, -10.0 + 4.0 * uniform01(rng)) / r;
    branches.add(std::abs(growth_factor_closed(t, r) - growth_factor_series(t, r)) / r);
  }
  return {"growth_factor", {origin.result(), decrease.result(), branches.result()}};
}

SuiteResult distance_suite(const DistanceField& field, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const DomainBoundary& b = field.boundary();
  const ConvexBody& body = field.body();
  const double diam = b.diameter();
  Tally zero("boundary_zero", 1e-9 * diam), lip("lipschitz", 1e-9 * diam), ray("ray_linearity", 1e-8 * diam);
  const int stride = std::max(1, b.sample_count() / 64);
  for (int i = 0; i < b.sample_count(); i += stride) zero.add(field.value(b.sample_points()[i]));
  for (int k = 0; k < samples; ++k) {
    const Vec2 x = random_point(b, rng), y = random_point(b, rng);
    lip.add(field.value(x) - field.value(y) - body.polar_gauge(x - y));
    const double s = b.length() * uniform01(rng);
    const double t = 0.95 * uniform01(rng) * field.tau_at(s);
    ray.add(std::abs(field.value(ray_point(b, body, s, t)) - t));
  }
  return {"distance", {zero.result(), lip.result(), ray.result()}};
}

SuiteResult density_suite(const DistanceField& field, const SourceField& source, double h) {
  const DensityBoundReport bound = density_bound_check(field, source, h);
  CheckResult sup{"sup_bound", bound.max_density / bound.bound - 1.0, bound.rel_slack, 1, bound.passed ? 0u : 1u};
  const WeakIdentityReport weak = verify_weak_identity(field, source, standard_bumps(field), h);
  Tally w("weak_identity", 1e-3);
  for (const auto& e : weak.entries) w.add(e.residual);
  return {"transport_density", {sup, w.result()}};
}

SuiteResult minimizer_suite(const DistanceField& field, const SourceField& source, double h) {
  const Grid grid = Grid::with_spacing(field.boundary(), h);
  const MaxConvolution uf = minimal_minimizer(field, source, h);
  const GridFunction u = uf.on_grid(grid);
  const GridFunction d = GridFunction::sample(grid, [&](const Vec2& x) { return field.value(x); });
  const double diam = field.boundary().diameter();
  Tally below("below_distance", 1e-9 * diam), agree("equal_on_support", 1e-9 * diam);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.active(k)) continue;
    below.add(u.values[k] - d.values[k]);
    if (source.in_support(grid.node(k))) agree.add(std::abs(u.values[k] - d.values[k]));
  }
  return {"minimizer", {below.result(), agree.result()}};
}

}  // namespace mkt
