#include "mkt/transport_density.hpp"

#include "mkt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace mkt {

double growth_factor_closed(double t, double r, int n) {
  if (t == 0.0) return r;
  // 1 - (1 - u)^n = u * sum_{k<n} (1 - u)^k, no cancellation near u = 0.
  const double q = 1.0 - t * r;
  double sum = 0.0, pw = 1.0;
  for (int k = 0; k < n; ++k) {
    sum += pw;
    pw *= q;
  }
  return r * sum / n;
}

double growth_factor_series(double t, double r, int n) {
  // r * sum_{k=1}^{n} (-1)^{k+1} C(n, k) u^{k-1} / n, u = t r, truncated at u^3.
  const double u = t * r;
  double sum = 0.0, binom = 1.0, pw = 1.0, sign = 1.0;
  for (int k = 1; k <= std::min(n, 4); ++k) {
    binom = binom * (n - k + 1) / k;
    sum += sign * binom * pw;
    pw *= u;
    sign = -sign;
  }
  return r * sum / n;
}

double growth_factor(double t, double r, int n) {
  if (!(r > 0)) throw InputError("growth_factor: r must be positive");
  if (n < 1) throw InputError("growth_factor: dimension must be >= 1");
  if (t == 0.0) return r;
  return std::abs(t * r) < 1e-6 ? growth_factor_series(t, r, n) : growth_factor_closed(t, r, n);
}

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;
  double error = 0.0;

  double run(double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return step(a, b, fa, fm, fb, (b - a) * (fa + 4 * fm + fb) / 6, tol, 0);
  }

  double step(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) * (fa + 4 * flm + fm) / 6;
    const double right = (b - m) * (fm + 4 * frm + fb) / 6;
    const double diff = left + right - whole;
    if (depth >= max_depth || std::abs(diff) <= 15 * tol) {
      error += std::abs(diff) / 15;
      return left + right + diff / 15;
    }
    return step(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + step(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

DensityValue transport_density(const DistanceField& field, const SourceField& source, const Vec2& x,
                               const DensityOptions& options) {
  const DistanceSample s = field.sample(x);
  if (s.singular) return {0.0, 0.0, true};
  if (source.is_zero() || s.tau <= 0) return {};
  const DomainBoundary& b = field.boundary();
  const ConvexBody& body = field.body();
  const Projection& y = s.projections.front();
  const double kappa = anisotropic_curvature(b, body, y.arclength);
  const Vec2 dir = body.gauge_gradient(b.frame_at_param(y.param).normal);
  const double d = s.d;
  const double denom = 1.0 - d * kappa;
  const std::function<double(double)> g = [&](double t) {
    return source(x + t * dir) * (1.0 - (d + t) * kappa) / denom;
  };

  const double tau = s.tau;
  const double tol = options.rel_tol * source.sup_norm(b) * tau;
  std::vector<double> cuts{0.0};
  for (double t : source.breakpoints(x, dir, 0.0, tau))
    if (t > cuts.back()) cuts.push_back(t);
  cuts.push_back(tau);

  Simpson simpson{g, options.max_depth};
  double value = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], c = cuts[i + 1];
    if (c > a) value += simpson.run(a, c, tol * (c - a) / tau);
  }
  return {std::max(0.0, value), simpson.error, false};
}

GridFunction transport_density_grid(const DistanceField& field, const SourceField& source, const Grid& grid,
                                    const DensityOptions& options) {
  return GridFunction::sample(grid, [&](const Vec2& x) { return transport_density(field, source, x, options).value; });
}

double Bump::value(const Vec2& x) const {
  const Vec2 u = (x - center) / width;
  if (std::abs(u.x()) >= 1 || std::abs(u.y()) >= 1) return 0.0;
  return std::pow(1 - u.x() * u.x(), 3) * std::pow(1 - u.y() * u.y(), 3);
}

Vec2 Bump::gradient(const Vec2& x) const {
  const Vec2 u = (x - center) / width;
  if (std::abs(u.x()) >= 1 || std::abs(u.y()) >= 1) return Vec2::Zero();
  const double px = std::pow(1 - u.x() * u.x(), 3), py = std::pow(1 - u.y() * u.y(), 3);
  const double dpx = -6 * u.x() * std::pow(1 - u.x() * u.x(), 2), dpy = -6 * u.y() * std::pow(1 - u.y() * u.y(), 2);
  return Vec2(dpx * py, px * dpy) / width;
}

bool Bump::inside(const DomainBoundary& boundary) const {
  constexpr int kPerSide = 32;
  for (int k = 0; k <= kPerSide; ++k) {
    const double a = -1.0 + 2.0 * k / kPerSide;
    for (const Vec2& u : {Vec2(a, -1), Vec2(a, 1), Vec2(-1, a), Vec2(1, a)})
      if (!boundary.contains(center + width * u)) return false;
  }
  return true;
}

std::vector<Bump> standard_bumps(const DistanceField& field) {
  const double r = field.inradius();
  const Vec2 c = field.incenter();
  std::vector<Bump> out;
  for (double w : {0.2 * r, 0.4 * r})
    for (int j = -1; j <= 1; ++j)
      for (int i = -1; i <= 1; ++i) out.push_back({c + 0.3 * r * Vec2(i, j), w});
  return out;
}

WeakIdentityReport verify_weak_identity(const DistanceField& field, const SourceField& source,
                                        const std::vector<Bump>& bumps, double h) {
  const Grid grid = Grid::with_spacing(field.boundary(), h);
  const std::size_t n = grid.size();
  std::vector<Vec2> flux(n, Vec2::Zero());
  std::vector<double> fval(n, 0.0);
  std::vector<char> singular(n, 0);
  parallel_for(n, [&](std::size_t k) {
    if (!grid.active(k)) return;
    const Vec2 x = grid.node(k);
    fval[k] = source(x);
    const DensityValue v = transport_density(field, source, x);
    if (v.singular) {
      singular[k] = 1;
      return;
    }
    const DistanceSample s = field.distance(x);
    const Vec2 nu = field.boundary().frame_at_param(s.projections.front().param).normal;
    flux[k] = v.value * field.body().gauge_gradient(nu);
  });

  WeakIdentityReport rep;
  rep.grid_h = h;
  rep.singular_nodes = static_cast<std::size_t>(std::count(singular.begin(), singular.end(), 1));
  rep.normalization = source.sup_norm(field.boundary()) * field.boundary().area();
  const double cell = h * h;
  for (const Bump& bump : bumps) {
    WeakIdentityEntry e{bump};
    // Row sums first, then over rows.
    for (int j = 0; j < grid.ny(); ++j) {
      double fl = 0.0, so = 0.0;
      for (int i = 0; i < grid.nx(); ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * grid.nx() + i;
        if (!grid.active(k)) continue;
        const Vec2 x = grid.node(k);
        so += fval[k] * bump.value(x);
        if (!singular[k]) fl += flux[k].dot(bump.gradient(x));
      }
      e.flux += fl * cell;
      e.source += so * cell;
    }
    e.residual = rep.normalization > 0 ? std::abs(e.flux - e.source) / rep.normalization : std::abs(e.flux - e.source);
    rep.max_residual = std::max(rep.max_residual, e.residual);
    rep.entries.push_back(e);
  }
  return rep;
}

DensityBoundReport density_bound_check(const DistanceField& field, const SourceField& source, double h) {
  const Grid grid = Grid::with_spacing(field.boundary(), h);
  const GridFunction v = transport_density_grid(field, source, grid);
  DensityBoundReport rep;
  rep.grid_h = h;
  rep.sup_f = source.sup_norm(field.boundary());
  rep.H0 = min_mean_curvature(field.boundary(), field.body()).value;
  rep.inradius = field.inradius();
  rep.bound = rep.sup_f * growth_factor(rep.H0, rep.inradius);
  const double cut = 0.05 * rep.inradius;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.active(k)) continue;
    if (v.values[k] > rep.max_density) {
      rep.max_density = v.values[k];
      rep.argmax = grid.node(k);
    }
    if (field.value(grid.node(k)) >= cut) rep.interior_max = std::max(rep.interior_max, v.values[k]);
  }
  rep.passed = rep.max_density <= rep.bound * (1 + rep.rel_slack);
  rep.interior_margin = rep.bound - rep.interior_max;
  rep.interior_strict = rep.interior_margin > 0;
  return rep;
}

}  // namespace mkt
