#include "mkt/boundary.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace mkt {

namespace {

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 8> kGLNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGLWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

struct DomainBoundary::Slabs {
  double y0 = 0.0;
  double dy = 1.0;
  std::vector<std::vector<int>> bins;  // edge indices overlapping each horizontal slab

  int bin_of(double y) const {
    const int n = static_cast<int>(bins.size());
    return std::clamp(static_cast<int>(std::floor((y - y0) / dy)), 0, n - 1);
  }
};

DomainBoundary DomainBoundary::circle(double radius, const Vec2& center, int samples) {
  if (!(radius > 0) || !std::isfinite(radius)) throw InputError("circle: radius must be positive");
  require_finite(center, "circle");
  DomainBoundary b;
  b.kind_ = BoundaryKind::Circle;
  b.name_ = "circle";
  b.radius_ = radius;
  b.center_ = center;
  b.build(samples);
  return b;
}

DomainBoundary DomainBoundary::ellipse(double a, double b_axis, const Vec2& center, int samples) {
  if (!(a > 0) || !(b_axis > 0) || !std::isfinite(a) || !std::isfinite(b_axis))
    throw InputError("ellipse: semi-axes must be positive");
  require_finite(center, "ellipse");
  DomainBoundary b;
  b.kind_ = BoundaryKind::Ellipse;
  b.name_ = "ellipse";
  b.semi_a_ = a;
  b.semi_b_ = b_axis;
  b.center_ = center;
  b.build(samples);
  return b;
}

DomainBoundary DomainBoundary::parametric(CurveFn y, CurveFn dy, CurveFn ddy, int samples, std::string name) {
  if (!y || !dy || !ddy) throw InputError("parametric: curve and derivatives are required");
  DomainBoundary b;
  b.kind_ = BoundaryKind::Parametric;
  b.name_ = std::move(name);
  b.y_ = std::move(y);
  b.dy_ = std::move(dy);
  b.ddy_ = std::move(ddy);
  b.validate_parametric();
  b.build(samples);
  return b;
}

DomainBoundary DomainBoundary::polar_curve(double radius, double amplitude, int lobes, int samples) {
  if (!(radius > 0) || !(std::abs(amplitude) < 1)) throw InputError("polar_curve: invalid radius or amplitude");
  const double R = radius, eps = amplitude, k = lobes;
  auto r = [=](double t) { return R * (1 + eps * std::cos(k * t)); };
  auto r1 = [=](double t) { return -R * eps * k * std::sin(k * t); };
  auto r2 = [=](double t) { return -R * eps * k * k * std::cos(k * t); };
  return parametric([=](double t) { return Vec2(r(t) * std::cos(t), r(t) * std::sin(t)); },
                    [=](double t) {
                      return Vec2(r1(t) * std::cos(t) - r(t) * std::sin(t), r1(t) * std::sin(t) + r(t) * std::cos(t));
                    },
                    [=](double t) {
                      return Vec2(r2(t) * std::cos(t) - 2 * r1(t) * std::sin(t) - r(t) * std::cos(t),
                                  r2(t) * std::sin(t) + 2 * r1(t) * std::cos(t) - r(t) * std::sin(t));
                    },
                    samples, "polar-curve");
}

Vec2 DomainBoundary::curve(double t) const {
  switch (kind_) {
    case BoundaryKind::Circle:
      return center_ + radius_ * unit_direction(t);
    case BoundaryKind::Ellipse:
      return center_ + Vec2(semi_a_ * std::cos(t), semi_b_ * std::sin(t));
    case BoundaryKind::Parametric:
      return y_(t);
  }
  return Vec2::Zero();
}

Vec2 DomainBoundary::curve_d1(double t) const {
  switch (kind_) {
    case BoundaryKind::Circle:
      return radius_ * Vec2(-std::sin(t), std::cos(t));
    case BoundaryKind::Ellipse:
      return {-semi_a_ * std::sin(t), semi_b_ * std::cos(t)};
    case BoundaryKind::Parametric:
      return dy_(t);
  }
  return Vec2::Zero();
}

Vec2 DomainBoundary::curve_d2(double t) const {
  switch (kind_) {
    case BoundaryKind::Circle:
      return -radius_ * unit_direction(t);
    case BoundaryKind::Ellipse:
      return {-semi_a_ * std::cos(t), -semi_b_ * std::sin(t)};
    case BoundaryKind::Parametric:
      return ddy_(t);
  }
  return Vec2::Zero();
}

void DomainBoundary::validate_parametric() const {
  const double scale = std::max(1.0, curve(0).norm());
  if ((curve(kTwoPi) - curve(0)).norm() > 1e-9 * scale) throw ConfigurationError("parametric: curve is not closed");
  constexpr int kChecks = 256;
  constexpr double h = 1e-4;
  for (int i = 0; i < kChecks; ++i) {
    const double t = kTwoPi * (i + 0.37) / kChecks;
    const Vec2 d1 = curve_d1(t), d2 = curve_d2(t);
    if (d1.norm() <= 0) throw ConfigurationError("parametric: curve is not regular");
    const Vec2 fd1 = (curve(t + h) - curve(t - h)) / (2 * h);
    const Vec2 fd2 = (curve_d1(t + h) - curve_d1(t - h)) / (2 * h);
    if ((fd1 - d1).norm() > 1e-6 * std::max(1.0, d1.norm()) || (fd2 - d2).norm() > 1e-6 * std::max(1.0, d2.norm()))
      throw ConfigurationError("parametric: supplied derivatives are inconsistent with the curve");
  }
}

void DomainBoundary::build(int samples) {
  if (samples < 16) throw InputError("boundary: at least 16 samples are required");
  const int M = samples;
  table_theta_.resize(M + 1);
  table_s_.resize(M + 1);
  table_s_[0] = 0.0;
  for (int k = 0; k <= M; ++k) table_theta_[k] = kTwoPi * k / M;
  for (int k = 0; k < M; ++k) {
    const double a = table_theta_[k], b = table_theta_[k + 1];
    double sum = 0.0;
    for (int q = 0; q < 8; ++q) sum += kGLWeights[q] * curve_d1(0.5 * (a + b) + 0.5 * (b - a) * kGLNodes[q]).norm();
    table_s_[k + 1] = table_s_[k] + 0.5 * (b - a) * sum;
  }
  length_ = kind_ == BoundaryKind::Circle ? kTwoPi * radius_ : table_s_[M];
  if (kind_ == BoundaryKind::Circle)
    for (int k = 0; k <= M; ++k) table_s_[k] = radius_ * table_theta_[k];

  points_.resize(M);
  params_.resize(M);
  for (int i = 0; i < M; ++i) {
    params_[i] = param_of_arclength(i * length_ / M);
    points_[i] = curve(params_[i]);
  }

  double signed_area = 0.0;
  for (int i = 0; i < M; ++i) signed_area += cross(points_[i], points_[(i + 1) % M]);
  signed_area *= 0.5;
  if (signed_area <= 0) throw ConfigurationError("boundary: curve must be counterclockwise");

  switch (kind_) {
    case BoundaryKind::Circle:
      area_ = std::numbers::pi * radius_ * radius_;
      diameter_ = 2 * radius_;
      break;
    case BoundaryKind::Ellipse:
      area_ = std::numbers::pi * semi_a_ * semi_b_;
      diameter_ = 2 * std::max(semi_a_, semi_b_);
      break;
    case BoundaryKind::Parametric: {
      area_ = signed_area;
      const int stride = std::max(1, M / 2048);
      double best = 0.0;
      for (int i = 0; i < M; i += stride)
        for (int j = i + stride; j < M; j += stride) best = std::max(best, (points_[i] - points_[j]).norm());
      diameter_ = best;
      // Simplicity on a subsampled polygon.
      const int sub = std::max(1, M / 512);
      std::vector<Vec2> poly;
      for (int i = 0; i < M; i += sub) poly.push_back(points_[i]);
      const int n = static_cast<int>(poly.size());
      for (int i = 0; i < n; ++i)
        for (int j = i + 2; j < n; ++j) {
          if (i == 0 && j == n - 1) continue;
          if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
            throw ConfigurationError("boundary: curve self-intersects");
        }
      break;
    }
  }

  double sagitta = 0.0;
  const double ds = length_ / M;
  for (int i = 0; i < M; ++i) {
    const Vec2 mid_curve = curve(param_of_arclength((i + 0.5) * ds));
    const Vec2 mid_chord = 0.5 * (points_[i] + points_[(i + 1) % M]);
    sagitta = std::max(sagitta, (mid_curve - mid_chord).norm());
  }
  edge_tol_ = 1e-9 + 1.01 * sagitta;

  bbox_.lo = bbox_.hi = points_[0];
  for (const auto& p : points_) {
    bbox_.lo = bbox_.lo.cwiseMin(p);
    bbox_.hi = bbox_.hi.cwiseMax(p);
  }
  if (kind_ == BoundaryKind::Circle) {
    bbox_.lo = center_ - Vec2::Constant(radius_);
    bbox_.hi = center_ + Vec2::Constant(radius_);
  } else if (kind_ == BoundaryKind::Ellipse) {
    bbox_.lo = center_ - Vec2(semi_a_, semi_b_);
    bbox_.hi = center_ + Vec2(semi_a_, semi_b_);
  }

  auto slabs = std::make_shared<Slabs>();
  const int nbins = std::max(16, M / 4);
  slabs->y0 = bbox_.lo.y() - edge_tol_;
  slabs->dy = (bbox_.hi.y() - bbox_.lo.y() + 2 * edge_tol_) / nbins;
  slabs->bins.assign(nbins, {});
  for (int i = 0; i < M; ++i) {
    const Vec2& a = points_[i];
    const Vec2& b = points_[(i + 1) % M];
    const int lo = slabs->bin_of(std::min(a.y(), b.y()) - edge_tol_);
    const int hi = slabs->bin_of(std::max(a.y(), b.y()) + edge_tol_);
    for (int k = lo; k <= hi; ++k) slabs->bins[k].push_back(i);
  }
  slabs_ = std::move(slabs);
}

double DomainBoundary::wrap_arclength(double s) const {
  s = std::fmod(s, length_);
  if (s < 0) s += length_;
  if (s >= length_) s -= length_;
  return s;
}

double DomainBoundary::arclength_gap(double a, double b) const {
  double d = std::fmod(a - b, length_);
  if (d > 0.5 * length_) d -= length_;
  if (d < -0.5 * length_) d += length_;
  return d;
}

double DomainBoundary::arclength_of_param(double theta) const {
  theta = wrap_angle(theta);
  if (kind_ == BoundaryKind::Circle) return radius_ * theta;
  const int M = static_cast<int>(table_theta_.size()) - 1;
  const int k = std::clamp(static_cast<int>(theta / kTwoPi * M), 0, M - 1);
  const double a = table_theta_[k];
  double sum = 0.0;
  for (int q = 0; q < 8; ++q) sum += kGLWeights[q] * curve_d1(0.5 * (a + theta) + 0.5 * (theta - a) * kGLNodes[q]).norm();
  return table_s_[k] + 0.5 * (theta - a) * sum;
}

double DomainBoundary::param_of_arclength(double s) const {
  s = wrap_arclength(s);
  if (kind_ == BoundaryKind::Circle) return s / radius_;
  const int M = static_cast<int>(table_theta_.size()) - 1;
  const int k = std::clamp(
      static_cast<int>(std::upper_bound(table_s_.begin(), table_s_.end(), s) - table_s_.begin()) - 1, 0, M - 1);
  const double a = table_theta_[k], b = table_theta_[k + 1];
  double theta = a + (b - a) * (s - table_s_[k]) / (table_s_[k + 1] - table_s_[k]);
  for (int it = 0; it < 8; ++it) {
    double sum = 0.0;
    for (int q = 0; q < 8; ++q) sum += kGLWeights[q] * curve_d1(0.5 * (a + theta) + 0.5 * (theta - a) * kGLNodes[q]).norm();
    const double err = table_s_[k] + 0.5 * (theta - a) * sum - s;
    const double step = err / curve_d1(theta).norm();
    theta -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return theta;
}

Frame DomainBoundary::frame_at_param(double theta) const {
  Frame f;
  f.point = curve(theta);
  f.tangent = curve_d1(theta).normalized();
  f.normal = rot90(f.tangent);
  return f;
}

Frame DomainBoundary::frame(double s) const { return frame_at_param(param_of_arclength(s)); }

double DomainBoundary::euclidean_curvature(double s) const {
  const double t = param_of_arclength(s);
  const Vec2 d1 = curve_d1(t);
  return cross(d1, curve_d2(t)) / std::pow(d1.norm(), 3);
}

bool DomainBoundary::contains(const Vec2& x) const {
  require_finite(x, "contains");
  if (x.x() < bbox_.lo.x() - edge_tol_ || x.x() > bbox_.hi.x() + edge_tol_ || x.y() < bbox_.lo.y() - edge_tol_ ||
      x.y() > bbox_.hi.y() + edge_tol_)
    return false;
  const Slabs& slabs = *slabs_;
  const auto& edges = slabs.bins[slabs.bin_of(x.y())];
  const int M = sample_count();
  int winding = 0;
  for (int i : edges) {
    const Vec2& a = points_[i];
    const Vec2& b = points_[(i + 1) % M];
    if (segment_distance(x, a, b) <= edge_tol_) return true;
    if (a.y() <= x.y()) {
      if (b.y() > x.y() && cross(b - a, x - a) > 0) ++winding;
    } else if (b.y() <= x.y() && cross(b - a, x - a) < 0) {
      --winding;
    }
  }
  // Edges within tolerance can sit in neighbouring slabs.
  for (int k : {slabs.bin_of(x.y() - edge_tol_), slabs.bin_of(x.y() + edge_tol_)}) {
    if (&slabs.bins[k] == &edges) continue;
    for (int i : slabs.bins[k])
      if (segment_distance(x, points_[i], points_[(i + 1) % M]) <= edge_tol_) return true;
  }
  return winding != 0;
}

double DomainBoundary::polygon_distance(const Vec2& x) const {
  const int M = sample_count();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < M; ++i) best = std::min(best, segment_distance(x, points_[i], points_[(i + 1) % M]));
  return best;
}

CahnHoffman cahn_hoffman(const DomainBoundary& boundary, const ConvexBody& body, double s) {
  const Frame f = boundary.frame(s);
  const Vec2 ray = body.gauge_gradient(f.normal);
  return {-ray, ray};
}

Vec2 cahn_hoffman_derivative(const DomainBoundary& boundary, const ConvexBody& body, double s) {
  const double h = boundary.sample_spacing();
  const auto n = [&](double ds) { return cahn_hoffman(boundary, body, s + ds).n_rho; };
  return (-n(2 * h) + 8.0 * n(h) - 8.0 * n(-h) + n(-2 * h)) / (12.0 * h);
}

double anisotropic_curvature(const DomainBoundary& boundary, const ConvexBody& body, double s) {
  return cahn_hoffman_derivative(boundary, body, s).dot(boundary.frame(s).tangent);
}

MinCurvature min_mean_curvature(const DomainBoundary& boundary, const ConvexBody& body) {
  const int n = boundary.sample_count();
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double k = anisotropic_curvature(boundary, body, boundary.sample_arclength(i));
    if (k < best_val) {
      best_val = k;
      best = i;
    }
  }
  const double h = boundary.sample_spacing();
  const double s0 = boundary.sample_arclength(best);
  const auto r = boost::math::tools::brent_find_minima(
      [&](double s) { return anisotropic_curvature(boundary, body, s); }, s0 - h, s0 + h, 40);
  if (r.second < best_val) return {r.second, boundary.wrap_arclength(r.first)};
  return {best_val, s0};
}

double max_abs_curvature(const DomainBoundary& boundary, const ConvexBody& body) {
  double m = 0.0;
  for (int i = 0; i < boundary.sample_count(); ++i)
    m = std::max(m, std::abs(anisotropic_curvature(boundary, body, boundary.sample_arclength(i))));
  return m;
}

Vec2 ray_point(const DomainBoundary& boundary, const ConvexBody& body, double s, double t) {
  const Frame f = boundary.frame(s);
  return f.point + t * body.gauge_gradient(f.normal);
}

}  // namespace mkt
