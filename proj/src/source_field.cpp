#include "mkt/source_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <tuple>

namespace mkt {

namespace {

constexpr int kOutlinePoints = 16384;

double segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (x - (a + t * ab)).norm();
}

double polyline_distance(const Vec2& x, const std::vector<Vec2>& pts) {
  double best = pts.empty() ? std::numeric_limits<double>::infinity() : (x - pts.front()).norm();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) best = std::min(best, segment_distance(x, pts[i], pts[i + 1]));
  return best;
}

/// Points every `spacing` of arclength along a polyline, both ends included.
void resample(const std::vector<Vec2>& pts, double spacing, std::vector<Vec2>& out) {
  if (pts.empty()) return;
  out.push_back(pts.front());
  double carry = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i], b = pts[i + 1];
    const double len = (b - a).norm();
    double t = spacing - carry;
    while (t <= len) {
      out.push_back(a + (t / len) * (b - a));
      t += spacing;
    }
    carry = len - (t - spacing);
  }
  if ((out.back() - pts.back()).norm() > 1e-12) out.push_back(pts.back());
}

std::vector<Vec2> arc(const Vec2& c, double r, double t0, double t1, int n) {
  std::vector<Vec2> pts(n + 1);
  for (int k = 0; k <= n; ++k) pts[k] = c + r * unit_direction(t0 + (t1 - t0) * k / n);
  return pts;
}

bool polygon_contains(const std::vector<Vec2>& v, const Vec2& x) {
  const std::size_t n = v.size();
  double scale = 0.0;
  for (const auto& p : v) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
  const double edge_tol = 1e-12 * std::max(1.0, scale);
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    if (segment_distance(x, a, b) <= edge_tol) return true;
    if (a.y() <= x.y()) {
      if (b.y() > x.y() && cross(b - a, x - a) > 0) ++winding;
    } else if (b.y() <= x.y() && cross(b - a, x - a) < 0) {
      --winding;
    }
  }
  return winding != 0;
}

}  // namespace

Region Region::disk(const Vec2& center, double radius) {
  require_finite(center, "disk");
  if (!(radius > 0) || !std::isfinite(radius)) throw InputError("disk: radius must be positive");
  Region r;
  r.kind_ = RegionKind::Disk;
  r.params_ = {center.x(), center.y(), radius};
  return r;
}

Region Region::half_plane(const Vec2& n, double b) {
  require_finite(n, "halfplane");
  if (!(n.norm() > 0) || !std::isfinite(b)) throw InputError("halfplane: normal must be nonzero");
  Region r;
  r.kind_ = RegionKind::HalfPlane;
  r.params_ = {n.x(), n.y(), b};
  return r;
}

Region Region::box(const Vec2& lo, const Vec2& hi) {
  require_finite(lo, "box");
  require_finite(hi, "box");
  if (!(lo.x() <= hi.x() && lo.y() <= hi.y())) throw InputError("box: lo must not exceed hi");
  Region r;
  r.kind_ = RegionKind::Box;
  r.params_ = {lo.x(), lo.y(), hi.x(), hi.y()};
  return r;
}

Region Region::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw InputError("polygon: needs at least three vertices");
  for (const auto& v : vertices) require_finite(v, "polygon");
  Region r;
  r.kind_ = RegionKind::Polygon;
  r.vertices_ = std::move(vertices);
  return r;
}

Region Region::sector(const Vec2& center, double theta1, double theta2, double r1, double r2) {
  require_finite(center, "sector");
  if (!(r1 >= 0 && r2 > r1 && std::isfinite(r2))) throw InputError("sector: need 0 <= r1 < r2 < inf");
  if (!(theta2 > theta1) || !std::isfinite(theta1) || !std::isfinite(theta2))
    throw InputError("sector: need theta1 < theta2");
  Region r;
  r.kind_ = RegionKind::Sector;
  const bool full = theta2 - theta1 >= kTwoPi;
  if (full) theta2 = theta1 + kTwoPi;
  r.params_ = {center.x(), center.y(), theta1, theta2, r1, r2};
  r.outline_.push_back(arc(center, r2, theta1, theta2, kOutlinePoints));
  if (r1 > 0) r.outline_.push_back(arc(center, r1, theta1, theta2, kOutlinePoints));
  if (!full) {
    r.outline_.push_back({center + r1 * unit_direction(theta1), center + r2 * unit_direction(theta1)});
    r.outline_.push_back({center + r1 * unit_direction(theta2), center + r2 * unit_direction(theta2)});
  }
  return r;
}

Region Region::spiral(const Vec2& center, double a, double b, double r2) {
  require_finite(center, "spiral");
  if (!(a > 0 && b > 0 && r2 > a + kTwoPi * b && std::isfinite(r2)))
    throw InputError("spiral: need a > 0, b > 0 and r2 > a + 2 pi b");
  Region r;
  r.kind_ = RegionKind::Spiral;
  r.params_ = {center.x(), center.y(), a, b, r2};
  std::vector<Vec2> inner(kOutlinePoints + 1);
  for (int k = 0; k <= kOutlinePoints; ++k) {
    const double t = kTwoPi * k / kOutlinePoints;
    inner[k] = center + (a + b * t) * unit_direction(t);
  }
  r.outline_.push_back(std::move(inner));
  r.outline_.push_back({center + Vec2(a, 0), center + Vec2(a + kTwoPi * b, 0)});
  r.outline_.push_back(arc(center, r2, 0.0, kTwoPi, kOutlinePoints));
  return r;
}

Region Region::domain(const DomainBoundary& boundary) {
  Region r;
  r.kind_ = RegionKind::Domain;
  r.domain_ = std::make_shared<const DomainBoundary>(boundary);
  return r;
}

std::string Region::kind_name() const {
  switch (kind_) {
    case RegionKind::Disk: return "disk";
    case RegionKind::HalfPlane: return "halfplane";
    case RegionKind::Box: return "box";
    case RegionKind::Polygon: return "polygon";
    case RegionKind::Sector: return "sector";
    case RegionKind::Spiral: return "spiral";
    case RegionKind::Domain: return "domain";
  }
  return "unknown";
}

bool Region::contains(const Vec2& x) const {
  const auto& p = params_;
  switch (kind_) {
    case RegionKind::Disk: return (x - Vec2(p[0], p[1])).norm() <= p[2];
    case RegionKind::HalfPlane: return p[0] * x.x() + p[1] * x.y() <= p[2];
    case RegionKind::Box: return x.x() >= p[0] && x.y() >= p[1] && x.x() <= p[2] && x.y() <= p[3];
    case RegionKind::Polygon: return polygon_contains(vertices_, x);
    case RegionKind::Sector: {
      const Vec2 v = x - Vec2(p[0], p[1]);
      const double r = v.norm();
      if (r < p[4] || r > p[5]) return false;
      if (p[3] - p[2] >= kTwoPi || r == 0.0) return true;
      const double phi = wrap_angle(std::atan2(v.y(), v.x()) - p[2]);
      const double span = p[3] - p[2];
      return phi <= span + 1e-14 || phi >= kTwoPi - 1e-14;
    }
    case RegionKind::Spiral: {
      const Vec2 v = x - Vec2(p[0], p[1]);
      const double r = v.norm();
      if (r > p[4]) return false;
      const double phi = wrap_angle(std::atan2(v.y(), v.x()));
      return r >= p[2] + p[3] * phi;
    }
    case RegionKind::Domain: return domain_->contains(x);
  }
  return false;
}

double Region::outline_distance(const Vec2& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& piece : outline_) best = std::min(best, polyline_distance(x, piece));
  return best;
}

double Region::distance(const Vec2& x) const {
  const auto& p = params_;
  switch (kind_) {
    case RegionKind::Disk: return std::max(0.0, (x - Vec2(p[0], p[1])).norm() - p[2]);
    case RegionKind::HalfPlane: return std::max(0.0, (p[0] * x.x() + p[1] * x.y() - p[2]) / std::hypot(p[0], p[1]));
    case RegionKind::Box: {
      const double dx = std::max({p[0] - x.x(), 0.0, x.x() - p[2]});
      const double dy = std::max({p[1] - x.y(), 0.0, x.y() - p[3]});
      return std::hypot(dx, dy);
    }
    case RegionKind::Polygon: {
      if (contains(x)) return 0.0;
      std::vector<Vec2> closed = vertices_;
      closed.push_back(vertices_.front());
      return polyline_distance(x, closed);
    }
    case RegionKind::Sector:
    case RegionKind::Spiral: return contains(x) ? 0.0 : outline_distance(x);
    case RegionKind::Domain: return domain_->contains(x) ? 0.0 : domain_->polygon_distance(x);
  }
  return 0.0;
}

std::vector<Vec2> Region::boundary_samples(double spacing, const BoundingBox& clip) const {
  if (!(spacing > 0)) throw InputError("boundary_samples: spacing must be positive");
  std::vector<Vec2> out;
  const auto& p = params_;
  switch (kind_) {
    case RegionKind::Disk: {
      const int n = std::max(8, static_cast<int>(std::ceil(kTwoPi * p[2] / spacing)));
      for (int k = 0; k < n; ++k) out.push_back(Vec2(p[0], p[1]) + p[2] * unit_direction(kTwoPi * k / n));
      break;
    }
    case RegionKind::HalfPlane: {
      const Vec2 n(p[0], p[1]);
      const Vec2 base = p[2] * n / n.squaredNorm();
      const Vec2 t = rot90(n.normalized());
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const Vec2& corner : {clip.lo, clip.hi, Vec2(clip.lo.x(), clip.hi.y()), Vec2(clip.hi.x(), clip.lo.y())}) {
        lo = std::min(lo, (corner - base).dot(t));
        hi = std::max(hi, (corner - base).dot(t));
      }
      resample({base + lo * t, base + hi * t}, spacing, out);
      break;
    }
    case RegionKind::Box: {
      const Vec2 a(p[0], p[1]), b(p[2], p[1]), c(p[2], p[3]), d(p[0], p[3]);
      resample({a, b, c, d, a}, spacing, out);
      break;
    }
    case RegionKind::Polygon: {
      std::vector<Vec2> closed = vertices_;
      closed.push_back(vertices_.front());
      resample(closed, spacing, out);
      break;
    }
    case RegionKind::Sector:
    case RegionKind::Spiral:
      for (const auto& piece : outline_) resample(piece, spacing, out);
      break;
    case RegionKind::Domain: {
      const int n = std::max(8, static_cast<int>(std::ceil(domain_->length() / spacing)));
      for (int k = 0; k < n; ++k)
        out.push_back(domain_->curve(domain_->param_of_arclength(domain_->length() * k / n)));
      break;
    }
  }
  return out;
}

std::vector<double> Region::crossings(const Vec2& a, const Vec2& dir, double t0, double t1) const {
  std::vector<double> out;
  if (!(t1 > t0)) return out;
  constexpr int kSteps = 256;
  const auto in = [&](double t) { return contains(a + t * dir); };
  double prev_t = t0;
  bool prev = in(t0);
  for (int k = 1; k <= kSteps; ++k) {
    const double t = t0 + (t1 - t0) * k / kSteps;
    const bool cur = in(t);
    if (cur != prev) {
      double lo = prev_t, hi = t;
      for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (in(mid) == prev ? lo : hi) = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
    prev = cur;
    prev_t = t;
  }
  return out;
}

struct SourceField::SupCache {
  std::mutex mutex;
  std::vector<std::tuple<double, double, double, double>> keys;
  std::vector<double> values;
};

SourceField SourceField::zero() {
  SourceField s;
  s.name_ = "zero";
  s.sup_cache_ = std::make_shared<SupCache>();
  return s;
}

SourceField SourceField::constant(double value, const Region& region) { return piecewise({{value, region}}); }

SourceField SourceField::piecewise(std::vector<Term> terms) {
  SourceField s = zero();
  s.name_ = "piecewise";
  for (auto& t : terms) {
    if (!(t.value >= 0) || !std::isfinite(t.value)) throw InputError("source: term values must be finite and >= 0");
    if (t.value == 0) continue;
    s.support_.push_back(t.region);
    s.terms_.push_back(std::move(t));
  }
  return s;
}

SourceField SourceField::custom(Fn fn, std::vector<Region> support, std::string name) {
  if (!fn) throw InputError("source: empty evaluator");
  SourceField s = zero();
  s.name_ = std::move(name);
  s.custom_ = std::move(fn);
  s.custom_support_ = support;
  s.support_ = std::move(support);
  return s;
}

double SourceField::evaluate(const Vec2& x) const {
  double v = 0.0;
  for (const auto& t : terms_)
    if (t.region.contains(x)) v += t.value;
  if (custom_) {
    const double c = custom_(x);
    if (!(c >= 0) || !std::isfinite(c)) throw InputError("source: evaluator returned a negative or non-finite value");
    v += c;
  }
  return v;
}

bool SourceField::in_support(const Vec2& x) const {
  return std::any_of(support_.begin(), support_.end(), [&](const Region& r) { return r.contains(x); });
}

double SourceField::support_distance(const Vec2& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : support_) best = std::min(best, r.distance(x));
  return best;
}

double SourceField::sup_norm(const DomainBoundary& boundary) const {
  if (support_.empty()) return 0.0;
  const BoundingBox& bb = boundary.bounding_box();
  const auto key = std::make_tuple(boundary.length(), boundary.area(), bb.lo.x(), bb.lo.y());
  if (sup_cache_) {
    std::lock_guard lock(sup_cache_->mutex);
    for (std::size_t i = 0; i < sup_cache_->keys.size(); ++i)
      if (sup_cache_->keys[i] == key) return sup_cache_->values[i];
  }
  double best = 0.0;
  constexpr int kGrid = 256;
  const Vec2 cell = (bb.hi - bb.lo) / kGrid;
  for (int j = 0; j < kGrid; ++j)
    for (int i = 0; i < kGrid; ++i) {
      const Vec2 x = bb.lo + Vec2((i + 0.5) * cell.x(), (j + 0.5) * cell.y());
      if (boundary.contains(x)) best = std::max(best, evaluate(x));
    }
  for (const auto& r : support_)
    for (const Vec2& x : r.boundary_samples(boundary.diameter() / 1024, bb))
      if (boundary.contains(x)) best = std::max(best, evaluate(x));
  if (sup_cache_) {
    std::lock_guard lock(sup_cache_->mutex);
    sup_cache_->keys.push_back(key);
    sup_cache_->values.push_back(best);
  }
  return best;
}

SourceField SourceField::scaled(double factor) const {
  if (!(factor >= 0) || !std::isfinite(factor)) throw InputError("source: scale factor must be >= 0");
  if (factor == 0) return zero();
  SourceField s = zero();
  s.name_ = name_;
  for (auto t : terms_) {
    t.value *= factor;
    s.terms_.push_back(t);
  }
  if (custom_) s.custom_ = [fn = custom_, factor](const Vec2& x) { return factor * fn(x); };
  s.custom_support_ = custom_support_;
  s.support_ = support_;
  return s;
}

SourceField SourceField::plus(const SourceField& other) const {
  SourceField s = zero();
  s.name_ = name_ + "+" + other.name_;
  s.terms_ = terms_;
  s.terms_.insert(s.terms_.end(), other.terms_.begin(), other.terms_.end());
  if (custom_ && other.custom_)
    s.custom_ = [a = custom_, b = other.custom_](const Vec2& x) { return a(x) + b(x); };
  else
    s.custom_ = custom_ ? custom_ : other.custom_;
  s.custom_support_ = custom_support_;
  s.custom_support_.insert(s.custom_support_.end(), other.custom_support_.begin(), other.custom_support_.end());
  s.support_ = support_;
  s.support_.insert(s.support_.end(), other.support_.begin(), other.support_.end());
  return s;
}

std::vector<double> SourceField::breakpoints(const Vec2& a, const Vec2& dir, double t0, double t1) const {
  std::vector<double> out;
  for (const auto& t : terms_) {
    const auto c = t.region.crossings(a, dir, t0, t1);
    out.insert(out.end(), c.begin(), c.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mkt
