#include "mkt/distance_field.hpp"

#include "mkt/parallel.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <unordered_map>

namespace mkt {

struct DistanceField::Cache {
  std::once_flag tau_once;
  std::vector<double> tau;
  std::once_flag inradius_once;
  double inradius = 0.0;
  Vec2 incenter = Vec2::Zero();
};

DistanceField::DistanceField(ConvexBody body, DomainBoundary boundary, DistanceOptions options)
    : body_(std::move(body)),
      boundary_(std::move(boundary)),
      options_(options),
      cache_(std::make_shared<Cache>()) {
  delta_proj_ = options_.projection_tol_rel * boundary_.diameter();
  const int n = boundary_.sample_count();
  sample_kappa_.resize(n);
  for (int i = 0; i < n; ++i) {
    sample_kappa_[i] = anisotropic_curvature(boundary_, body_, boundary_.sample_arclength(i));
    max_abs_kappa_ = std::max(max_abs_kappa_, std::abs(sample_kappa_[i]));
  }
}

DistanceField::Minimum DistanceField::refine(const Vec2& x, int i) const {
  const auto& params = boundary_.sample_params();
  const int n = static_cast<int>(params.size());
  const double mid = params[i];
  const double lo = i == 0 ? params[n - 1] - kTwoPi : params[i - 1];
  const double hi = i == n - 1 ? params[0] + kTwoPi : params[i + 1];

  const auto g = [&](double t) { return body_.polar_gauge(x - boundary_.curve(t)); };
  const double tiny = 1e-13 * std::max(1.0, boundary_.diameter());
  const auto dg = [&](double t) {
    const Vec2 v = x - boundary_.curve(t);
    if (v.norm() <= tiny) return 0.0;
    return -body_.polar_gauge_gradient(v).dot(boundary_.curve_d1(t));
  };

  Minimum best{g(mid), mid};
  const bool smooth = best.value > tiny && g(lo) > tiny && g(hi) > tiny;
  bool solved = false;
  if (smooth) {
    const double dlo = dg(lo), dhi = dg(hi);
    if (dlo < 0 && dhi > 0) {
      std::uintmax_t iters = 80;
      const auto r = boost::math::tools::toms748_solve(dg, lo, hi, dlo, dhi,
                                                       boost::math::tools::eps_tolerance<double>(50), iters);
      const double t = 0.5 * (r.first + r.second);
      if (const double v = g(t); v <= best.value) best = {v, t};
      solved = true;
    }
  }
  if (!solved) {
    const auto r = boost::math::tools::brent_find_minima(g, lo, hi, std::numeric_limits<double>::digits);
    if (r.second <= best.value) best = {r.second, r.first};
  }
  best.param = wrap_angle(best.param);
  return best;
}

std::vector<DistanceField::Minimum> DistanceField::refined_minima(const Vec2& x, double tol) const {
  const auto& pts = boundary_.sample_points();
  const int n = static_cast<int>(pts.size());
  std::vector<double> f(n);
  int i0 = 0;
  for (int i = 0; i < n; ++i) {
    f[i] = body_.polar_gauge(x - pts[i]);
    if (f[i] < f[i0]) i0 = i;
  }
  std::vector<Minimum> out;
  out.push_back(refine(x, i0));
  double best = out.front().value;
  for (int i = 0; i < n; ++i) {
    if (i == i0) continue;
    const double prev = f[(i + n - 1) % n], next = f[(i + 1) % n];
    if (f[i] > prev || f[i] > next) continue;
    const double lower = f[i] - 2.0 * (std::max(prev, next) - f[i]) - 1e-15;
    if (lower > best + tol) continue;
    const Minimum m = refine(x, i);
    best = std::min(best, m.value);
    out.push_back(m);
  }
  std::erase_if(out, [&](const Minimum& m) { return m.value > best + tol; });
  std::sort(out.begin(), out.end(), [](const Minimum& a, const Minimum& b) { return a.value < b.value; });
  return out;
}

std::vector<Projection> DistanceField::to_projections(const std::vector<Minimum>& minima) const {
  std::vector<Projection> proj;
  proj.reserve(minima.size());
  for (const auto& m : minima)
    proj.push_back({boundary_.arclength_of_param(m.param), m.param, boundary_.curve(m.param), m.value});
  std::sort(proj.begin(), proj.end(), [](const Projection& a, const Projection& b) { return a.arclength < b.arclength; });

  std::vector<Projection> merged;
  for (const auto& p : proj) {
    if (!merged.empty() && std::abs(boundary_.arclength_gap(p.arclength, merged.back().arclength)) < options_.merge_tol) {
      if (p.value < merged.back().value) merged.back() = p;
      continue;
    }
    merged.push_back(p);
  }
  if (merged.size() > 1 &&
      std::abs(boundary_.arclength_gap(merged.front().arclength, merged.back().arclength)) < options_.merge_tol) {
    if (merged.back().value < merged.front().value) merged.front() = merged.back();
    merged.pop_back();
  }
  return merged;
}

DistanceSample DistanceField::distance(const Vec2& x) const {
  require_finite(x, "distance");
  if (!boundary_.contains(x)) throw DomainError("distance: point outside the closed domain");
  const auto minima = refined_minima(x, delta_proj_);
  DistanceSample out;
  out.x = x;
  out.d = minima.front().value;
  out.projections = to_projections(minima);
  const auto cap = static_cast<std::size_t>(std::max(2, options_.max_representatives));
  if (out.projections.size() > cap) {
    std::vector<Projection> reps;
    for (std::size_t k = 0; k < cap; ++k) reps.push_back(out.projections[k * out.projections.size() / cap]);
    out.projections = std::move(reps);
  }
  // Report the best value first.
  const auto it = std::min_element(out.projections.begin(), out.projections.end(),
                                   [](const Projection& a, const Projection& b) { return a.value < b.value; });
  std::rotate(out.projections.begin(), it, out.projections.end());
  if (out.projections.size() == 1) {
    // Near a centre of curvature the tol-minimisers form an arc with a single local minimum;
    // its farthest sample stands in as a second representative.
    const Vec2 y = out.projections.front().point;
    int far = -1;
    double far_dist = 0.5 * out.d;
    const auto& pts = boundary_.sample_points();
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      const double v = body_.polar_gauge(x - pts[i]);
      if (v <= out.d + delta_proj_ && (pts[i] - y).norm() > far_dist) far = i, far_dist = (pts[i] - y).norm();
    }
    if (far >= 0)
      out.projections.push_back({boundary_.sample_arclength(far), boundary_.sample_params()[far], pts[far],
                                 body_.polar_gauge(x - pts[far])});
  }
  out.singular = out.projections.size() >= 2;
  return out;
}

double DistanceField::value(const Vec2& x) const {
  require_finite(x, "distance");
  if (!boundary_.contains(x)) throw DomainError("distance: point outside the closed domain");
  return refined_minima(x, 0.0).front().value;
}

bool DistanceField::distance_below(const Vec2& x, double threshold) const {
  const auto& pts = boundary_.sample_points();
  const int n = static_cast<int>(pts.size());
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) {
    f[i] = body_.polar_gauge(x - pts[i]);
    if (f[i] < threshold) return true;
  }
  for (int i = 0; i < n; ++i) {
    const double prev = f[(i + n - 1) % n], next = f[(i + 1) % n];
    if (f[i] > prev || f[i] > next) continue;
    const double lower = f[i] - 2.0 * (std::max(prev, next) - f[i]) - 1e-15;
    if (lower >= threshold) continue;
    if (refine(x, i).value < threshold) return true;
  }
  return false;
}

int DistanceField::count_projections(const Vec2& x, double tol) const {
  if (!boundary_.contains(x)) return 0;
  const auto minima = refined_minima(x, tol);
  const int n = static_cast<int>(to_projections(minima).size());
  if (n >= 2) return n;
  // A near-continuum of tol-minimisers (close to a centre of curvature) counts as two
  // projections when it spreads over more than half the distance.
  const double d = minima.front().value;
  const Vec2 y = boundary_.curve(minima.front().param);
  for (const Vec2& p : boundary_.sample_points())
    if (body_.polar_gauge(x - p) <= d + tol && (p - y).norm() > 0.5 * d) return 2;
  return n;
}

Vec2 DistanceField::gradient_d(const Vec2& x) const {
  const DistanceSample s = distance(x);
  if (s.singular) throw SingularPointError("gradient_d: point lies on the singular set");
  const Projection& p = s.projections.front();
  const Vec2 v = x - p.point;
  if (v.norm() > 1e-12 * std::max(1.0, boundary_.diameter())) return body_.polar_gauge_gradient(v);
  const Vec2 nu = boundary_.frame_at_param(p.param).normal;
  return nu / body_.gauge(nu);
}

double DistanceField::cut_time_boundary(double s) const {
  s = boundary_.wrap_arclength(s);
  const Frame fr = boundary_.frame(s);
  const Vec2 dir = body_.gauge_gradient(fr.normal);
  const double kappa = anisotropic_curvature(boundary_, body_, s);

  double hi = boundary_.diameter() / body_.enclosing_constants().c1;
  if (kappa > 0) hi = std::min(hi, 1.0 / kappa);
  const auto still_projection = [&](double t) {
    if (t * kappa >= 1.0) return false;
    const Vec2 xt = fr.point + t * dir;
    if (!boundary_.contains(xt)) return false;
    return !distance_below(xt, t - delta_proj_);
  };
  double lo = 0.0;
  if (still_projection(hi)) return hi;
  const double tol = 1e-8 * boundary_.diameter();
  // Cuts at the focal bound are common (disks); test the last bracket first.
  if (hi > tol && still_projection(hi - tol)) return hi - 0.5 * tol;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (still_projection(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

const std::vector<double>& DistanceField::tau_table() const {
  std::call_once(cache_->tau_once, [this] {
    const int n = boundary_.sample_count();
    std::vector<double> tau(n);
    parallel_for(n, [&](std::size_t i) { tau[i] = cut_time_boundary(boundary_.sample_arclength(static_cast<int>(i))); });
    cache_->tau = std::move(tau);
  });
  return cache_->tau;
}

double DistanceField::tau_at(double s) const {
  const auto& tau = tau_table();
  const int n = static_cast<int>(tau.size());
  const double u = boundary_.wrap_arclength(s) / boundary_.sample_spacing();
  const int i = std::min(static_cast<int>(std::floor(u)), n - 1);
  const double t = u - i;
  const double p0 = tau[(i + n - 1) % n], p1 = tau[i], p2 = tau[(i + 1) % n], p3 = tau[(i + 2) % n];
  // Catmull-Rom
  const double v = p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
  return std::max(0.0, v);
}

double DistanceField::min_boundary_tau() const {
  const auto& tau = tau_table();
  return *std::min_element(tau.begin(), tau.end());
}

CutTime DistanceField::cut_time_interior(const Vec2& x) const {
  const DistanceSample ds = distance(x);
  if (ds.singular) return {0.0, std::nullopt};
  const Projection& p = ds.projections.front();
  const double tau_y = tau_at(p.arclength);
  const Vec2 dir = body_.gauge_gradient(boundary_.frame_at_param(p.param).normal);
  return {std::max(0.0, tau_y - ds.d), p.point + tau_y * dir};
}

DistanceSample DistanceField::sample(const Vec2& x) const {
  DistanceSample ds = distance(x);
  if (ds.singular) return ds;
  const Projection& p = ds.projections.front();
  const Vec2 v = x - p.point;
  const Vec2 nu = boundary_.frame_at_param(p.param).normal;
  ds.grad_d = v.norm() > 1e-12 * std::max(1.0, boundary_.diameter()) ? body_.polar_gauge_gradient(v)
                                                                    : Vec2(nu / body_.gauge(nu));
  const double tau_y = tau_at(p.arclength);
  ds.tau = std::max(0.0, tau_y - ds.d);
  ds.cut_point = p.point + tau_y * body_.gauge_gradient(nu);
  return ds;
}

namespace {

struct PointHash {
  double cell;
  std::unordered_map<std::int64_t, std::vector<int>> buckets;

  static std::int64_t key(std::int64_t i, std::int64_t j) { return (i << 32) ^ (j & 0xffffffff); }
  std::pair<std::int64_t, std::int64_t> coords(const Vec2& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell)), static_cast<std::int64_t>(std::floor(p.y() / cell))};
  }
  void insert(const Vec2& p, int idx) {
    const auto [i, j] = coords(p);
    buckets[key(i, j)].push_back(idx);
  }
  template <class Fn>
  void near(const Vec2& p, int reach, Fn&& fn) const {
    const auto [i, j] = coords(p);
    for (std::int64_t a = i - reach; a <= i + reach; ++a)
      for (std::int64_t b = j - reach; b <= j + reach; ++b)
        if (auto it = buckets.find(key(a, b)); it != buckets.end())
          for (int idx : it->second) fn(idx);
  }
};

}  // namespace

SingularSet DistanceField::singular_set(double h) const {
  if (!(h > 0)) throw InputError("singular_set: resolution must be positive");
  const BoundingBox& bb = boundary_.bounding_box();
  const int nx = std::max(1, static_cast<int>(std::ceil((bb.hi.x() - bb.lo.x()) / h)));
  const int ny = std::max(1, static_cast<int>(std::ceil((bb.hi.y() - bb.lo.y()) / h)));
  const auto node = [&](int i, int j) { return Vec2(bb.lo.x() + (i + 0.5) * h, bb.lo.y() + (j + 0.5) * h); };

  struct NodeInfo {
    bool inside = false;
    bool singular = false;
    double s = 0.0;
  };
  std::vector<NodeInfo> info(static_cast<std::size_t>(nx) * ny);
  parallel_for(info.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    const Vec2 x = node(i, j);
    if (!boundary_.contains(x)) return;
    const DistanceSample ds = distance(x);
    info[k] = {true, ds.singular, ds.projections.front().arclength};
  });

  const double verify_tol = 10.0 * delta_proj_;
  const double jump = 4.0 * h * std::max(max_abs_kappa_, 1e-12);
  std::vector<Vec2> raw;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (const auto& a = info[j * nx + i]; a.inside && a.singular) raw.push_back(node(i, j));

  // Bisection across neighbour pairs whose projections jump.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      if (!info[k].inside || info[k].singular) continue;
      for (const auto& [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
        if (i + di >= nx || j + dj >= ny) continue;
        const std::size_t m = (j + dj) * nx + (i + di);
        if (!info[m].inside || info[m].singular) continue;
        if (std::abs(boundary_.arclength_gap(info[k].s, info[m].s)) > jump) pairs.emplace_back(k, m);
      }
    }
  std::vector<std::optional<Vec2>> located(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t q) {
    const auto [k, m] = pairs[q];
    Vec2 a = node(static_cast<int>(k % nx), static_cast<int>(k / nx));
    Vec2 b = node(static_cast<int>(m % nx), static_cast<int>(m / nx));
    const double sa = info[k].s, sb = info[m].s;
    const double stop = 1e-10 * boundary_.diameter();
    while ((b - a).norm() > stop) {
      const Vec2 c = 0.5 * (a + b);
      const DistanceSample ds = distance(c);
      if (ds.singular) {
        a = b = c;
        break;
      }
      const double sc = ds.projections.front().arclength;
      (std::abs(boundary_.arclength_gap(sc, sa)) <= std::abs(boundary_.arclength_gap(sc, sb)) ? a : b) = c;
    }
    const Vec2 p = 0.5 * (a + b);
    if (count_projections(p, verify_tol) >= 2) located[q] = p;
  });
  for (const auto& p : located)
    if (p) raw.push_back(*p);

  // Endpoints of the boundary rays.
  const auto& tau = tau_table();
  const int nb = boundary_.sample_count();
  std::vector<std::optional<Vec2>> ends(nb);
  parallel_for(nb, [&](std::size_t i) {
    const Vec2 m = ray_point(boundary_, body_, boundary_.sample_arclength(static_cast<int>(i)), tau[i]);
    if (boundary_.contains(m) && count_projections(m, verify_tol) >= 2) ends[i] = m;
  });
  for (const auto& p : ends)
    if (p) raw.push_back(*p);

  SingularSet out;
  out.resolution = h;
  PointHash dedup{0.5 * h, {}};
  for (const Vec2& p : raw) {
    bool close = false;
    dedup.near(p, 1, [&](int idx) { close = close || (out.points[idx] - p).norm() < 0.5 * h; });
    if (close) continue;
    dedup.insert(p, static_cast<int>(out.points.size()));
    out.points.push_back(p);
  }
  out.adjacency.resize(out.points.size());
  PointHash adj{2.0 * h, {}};
  for (std::size_t i = 0; i < out.points.size(); ++i) adj.insert(out.points[i], static_cast<int>(i));
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    adj.near(out.points[i], 1, [&](int idx) {
      if (idx != static_cast<int>(i) && (out.points[idx] - out.points[i]).norm() <= 2.0 * h)
        out.adjacency[i].push_back(idx);
    });
    std::sort(out.adjacency[i].begin(), out.adjacency[i].end());
  }
  return out;
}

double DistanceField::inradius() const {
  std::call_once(cache_->inradius_once, [this] {
    const BoundingBox& bb = boundary_.bounding_box();
    constexpr int kCoarse = 64;
    const Vec2 cell = (bb.hi - bb.lo) / kCoarse;
    std::vector<double> vals(kCoarse * kCoarse, -1.0);
    parallel_for(vals.size(), [&](std::size_t k) {
      const Vec2 x = bb.lo + Vec2((k % kCoarse + 0.5) * cell.x(), (k / kCoarse + 0.5) * cell.y());
      if (boundary_.contains(x)) vals[k] = value(x);
    });
    const std::size_t kb = std::max_element(vals.begin(), vals.end()) - vals.begin();
    Vec2 best = bb.lo + Vec2((kb % kCoarse + 0.5) * cell.x(), (kb / kCoarse + 0.5) * cell.y());
    double best_val = vals[kb];
    const auto eval = [&](const Vec2& x) { return boundary_.contains(x) ? value(x) : -1.0; };
    double step = cell.maxCoeff();
    const double stop = 1e-8 * boundary_.diameter();
    while (step > stop) {
      bool moved = false;
      for (int dir = 0; dir < 8; ++dir) {
        const Vec2 cand = best + step * unit_direction(dir * std::numbers::pi / 4);
        if (const double v = eval(cand); v > best_val) {
          best_val = v;
          best = cand;
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
    cache_->inradius = best_val;
    cache_->incenter = best;
  });
  return cache_->inradius;
}

Vec2 DistanceField::incenter() const {
  inradius();
  return cache_->incenter;
}

}  // namespace mkt
