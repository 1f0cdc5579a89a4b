#include "mkt/minimizer.hpp"

#include "mkt/parallel.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mkt {

MaxConvolution::MaxConvolution(DistanceField field, std::vector<Region> set, double h)
    : field_(std::move(field)), set_(std::move(set)), h_(h) {
  if (!(h > 0)) throw InputError("max_convolution: resolution must be positive");
  const DomainBoundary& b = field_.boundary();
  for (const Region& r : set_)
    for (const Vec2& z : r.boundary_samples(0.25 * h, b.bounding_box()))
      if (b.contains(z)) region_z_.push_back(z);
  region_d_.resize(region_z_.size());
  parallel_for(region_z_.size(), [&](std::size_t i) { region_d_[i] = field_.value(region_z_[i]); });
}

bool MaxConvolution::in_set(const Vec2& x) const {
  return std::any_of(set_.begin(), set_.end(), [&](const Region& r) { return r.contains(x); });
}

double MaxConvolution::lipschitz() const { return std::max(1.0, 1.0 / field_.body().enclosing_constants().c1); }

double MaxConvolution::objective(const Vec2& z, const Vec2& x) const {
  return field_.value(z) - field_.body().polar_gauge(z - x);
}

double MaxConvolution::value(const Vec2& x, bool refine) const {
  require_finite(x, "max_convolution");
  const DomainBoundary& b = field_.boundary();
  const ConvexBody& body = field_.body();
  if (!b.contains(x)) throw DomainError("max_convolution: point outside the closed domain");
  if (in_set(x)) return field_.value(x);

  double best = -std::numeric_limits<double>::infinity();
  std::ptrdiff_t best_region = -1, best_boundary = -1;
  for (std::size_t i = 0; i < region_z_.size(); ++i) {
    const double v = region_d_[i] - body.polar_gauge(region_z_[i] - x);
    if (v > best) {
      best = v;
      best_region = static_cast<std::ptrdiff_t>(i);
    }
  }
  const auto& pts = b.sample_points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = -body.polar_gauge(pts[i] - x);
    if (v > best) {
      best = v;
      best_region = -1;
      best_boundary = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (!refine) return best;

  if (best_boundary >= 0) {
    const auto& params = b.sample_params();
    const int n = static_cast<int>(params.size());
    const int i = static_cast<int>(best_boundary);
    const double lo = i == 0 ? params[n - 1] - kTwoPi : params[i - 1];
    const double hi = i == n - 1 ? params[0] + kTwoPi : params[i + 1];
    const auto r = boost::math::tools::brent_find_minima(
        [&](double t) { return body.polar_gauge(b.curve(t) - x); }, lo, hi, std::numeric_limits<double>::digits);
    return std::max(best, -r.second);
  }

  Vec2 z = region_z_[best_region];
  double step = 0.25 * h_;
  const double stop = 1e-9 * b.diameter();
  while (step > stop) {
    bool moved = false;
    for (int dir = 0; dir < 8; ++dir) {
      const Vec2 cand = z + step * unit_direction(dir * std::numbers::pi / 4);
      if (!in_set(cand) || !b.contains(cand)) continue;
      if (const double v = objective(cand, x); v > best) {
        best = v;
        z = cand;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

GridFunction MaxConvolution::on_grid(const Grid& grid) const {
  return GridFunction::sample(grid, [&](const Vec2& x) { return value(x, false); });
}

RaySystem::RaySystem(DistanceField field, std::vector<Region> set) : field_(std::move(field)), set_(std::move(set)) {
  const auto& tau = field_.tau_table();
  const int n = field_.boundary().sample_count();
  sigma_.resize(n);
  parallel_for(n, [&](std::size_t i) { sigma_[i] = scan(field_.boundary().sample_arclength(static_cast<int>(i)), tau[i]); });
}

bool RaySystem::in_set(const Vec2& x) const {
  return std::any_of(set_.begin(), set_.end(), [&](const Region& r) { return r.contains(x); });
}

std::optional<double> RaySystem::scan(double s, double tau) const {
  const DomainBoundary& b = field_.boundary();
  const ConvexBody& body = field_.body();
  const auto hit = [&](double t) { return in_set(ray_point(b, body, s, t)); };
  int last = -1;
  for (int k = 0; k <= kScanSteps; ++k)
    if (hit(tau * k / kScanSteps)) last = k;
  if (last < 0) return std::nullopt;
  if (last == kScanSteps) return tau;
  double lo = tau * last / kScanSteps, hi = tau * (last + 1) / kScanSteps;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (hit(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::optional<Vec2> RaySystem::reduced_point(int i) const {
  if (!sigma_.at(i)) return std::nullopt;
  const DomainBoundary& b = field_.boundary();
  return ray_point(b, field_.body(), b.sample_arclength(i), *sigma_[i]);
}

std::optional<double> RaySystem::sigma_at(double s) const { return scan(s, field_.tau_at(s)); }

double RaySystem::lambda_star(const Vec2& x, double tol) const {
  if (!field_.boundary().contains(x)) return 0.0;
  const DistanceSample ds = field_.distance(x);
  double best = 0.0;
  for (const auto& p : ds.projections)
    if (const auto s = sigma_at(p.arclength); s && ds.d <= *s + tol) best = std::max(best, *s);
  return best;
}

bool RaySystem::in_extended_transport_set(const Vec2& x, double tol) const {
  if (!field_.boundary().contains(x)) return false;
  if (in_set(x)) return true;
  const DistanceSample ds = field_.distance(x);
  return std::any_of(ds.projections.begin(), ds.projections.end(), [&](const Projection& p) {
    const auto s = sigma_at(p.arclength);
    return s && ds.d <= *s + tol;
  });
}

MaxConvolution minimal_minimizer(const DistanceField& field, const SourceField& source, double h) {
  return MaxConvolution(field, source.support(), h);
}

GapEstimate minimizer_gap(const MaxConvolution& uf, const Grid& grid) {
  const GridFunction u = uf.on_grid(grid);
  const GridFunction d = GridFunction::sample(grid, [&](const Vec2& x) { return uf.field().value(x); });
  GapEstimate g;
  g.grid_h = grid.spacing();
  g.gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.active(k)) continue;
    if (const double e = d.values[k] - u.values[k]; e > g.gap) {
      g.gap = e;
      g.argmax = grid.node(k);
    }
  }
  if (!std::isfinite(g.gap)) g.gap = 0.0;
  return g;
}

UniquenessVerdict uniqueness_verdict(const DistanceField& field, const SourceField& source, const SingularSet& sigma,
                                     double h) {
  UniquenessVerdict v;
  v.tolerance = 2.0 * h;
  v.sigma_points = sigma.points.size();
  for (const Vec2& p : sigma.points) {
    const double dist = source.support_distance(p);
    if (dist <= v.tolerance) continue;
    ++v.uncovered;
    if (!v.witness || dist > v.witness_distance) {
      v.witness = p;
      v.witness_distance = dist;
    }
  }
  v.unique = v.uncovered == 0;
  v.gap = minimizer_gap(minimal_minimizer(field, source, h), Grid::with_spacing(field.boundary(), h));
  return v;
}

}  // namespace mkt
