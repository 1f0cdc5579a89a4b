#include "mkt/convex_body.hpp"

#include <boost/math/tools/minima.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mkt {

struct ConvexBody::DirectionTable {
  std::vector<double> angles;
  std::vector<Vec2> points;          // boundary points e_k / rho(e_k)
  std::vector<double> normal_angles; // unwrapped, non-decreasing when monotone
  bool monotone = false;
};

namespace {

constexpr int kN = ConvexBody::kDirectionCount;

double angle_step() { return kTwoPi / kN; }

}  // namespace

ConvexBody ConvexBody::euclidean() {
  ConvexBody b;
  b.kind_ = BodyKind::Euclidean;
  b.name_ = "euclidean";
  b.finish_construction();
  return b;
}

ConvexBody ConvexBody::ellipse(const Mat2& A) {
  if (!A.allFinite()) throw InputError("ellipse: non-finite matrix");
  if (std::abs(A(0, 1) - A(1, 0)) > 1e-12 * A.norm())
    throw ConfigurationError("ellipse: matrix is not symmetric");
  if (A(0, 0) <= 0 || A.determinant() <= 0)
    throw ConfigurationError("ellipse: matrix is not positive definite");
  ConvexBody b;
  b.kind_ = BodyKind::Ellipse;
  b.name_ = "ellipse";
  b.A_ = 0.5 * (A + A.transpose());
  b.A_inv_ = b.A_.inverse();
  b.finish_construction();
  return b;
}

ConvexBody ConvexBody::user(GaugeFn gauge, std::string name) {
  if (!gauge) throw InputError("user gauge: empty function");
  ConvexBody b;
  b.kind_ = BodyKind::UserGauge;
  b.name_ = std::move(name);
  b.user_ = std::move(gauge);

  auto table = std::make_shared<DirectionTable>();
  table->angles.resize(kN);
  table->points.resize(kN);
  table->normal_angles.resize(kN);
  for (int k = 0; k < kN; ++k) {
    const double a = k * angle_step();
    const Vec2 e = unit_direction(a);
    const double r = b.user_(e);
    if (!(r > 0) || !std::isfinite(r))
      throw ConfigurationError("user gauge: not positive on the unit circle");
    table->angles[k] = a;
    table->points[k] = e / r;
  }
  b.table_ = table;
  double prev = 0.0;
  bool monotone = true;
  for (int k = 0; k < kN; ++k) {
    const Vec2 g = b.fd_gradient(unit_direction(table->angles[k]));
    double a = std::atan2(g.y(), g.x());
    if (k == 0) {
      prev = a;
    } else {
      while (a < prev - std::numbers::pi) a += kTwoPi;
      while (a > prev + std::numbers::pi) a -= kTwoPi;
      if (a < prev - 1e-12) monotone = false;
      prev = a;
    }
    table->normal_angles[k] = a;
  }
  if (table->normal_angles.back() - table->normal_angles.front() > kTwoPi + 1e-9) monotone = false;
  table->monotone = monotone;
  b.finish_construction();
  return b;
}

ConvexBody ConvexBody::randers(const Vec2& drift) {
  require_finite(drift, "randers");
  if (drift.norm() >= 1.0) throw ConfigurationError("randers: |b| must be < 1");
  return user([drift](const Vec2& xi) { return xi.norm() + drift.dot(xi); }, "randers");
}

ConvexBody ConvexBody::max_norm() {
  return user([](const Vec2& xi) { return std::max(std::abs(xi.x()), std::abs(xi.y())); },
              "max-norm");
}

ConvexBody ConvexBody::scaled(double factor) const {
  if (!(factor > 0) || !std::isfinite(factor)) throw InputError("scaled: factor must be positive");
  ConvexBody b = *this;
  b.scale_ = scale_ * factor;
  b.constants_ = {constants_.c1 / factor, constants_.c2 / factor};
  return b;
}

void ConvexBody::finish_construction() {
  std::vector<double> values(kN);
  for (int k = 0; k < kN; ++k) values[k] = raw_gauge(unit_direction(k * angle_step())) / scale_;

  // Sampled extremes, then a local refinement so the constants stay valid between samples.
  const auto refine = [&](int k, bool want_min) {
    const auto f = [&](double a) {
      const double v = raw_gauge(unit_direction(a)) / scale_;
      return want_min ? v : -v;
    };
    const double lo = (k - 1) * angle_step();
    const double hi = (k + 1) * angle_step();
    const auto r = boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits);
    return want_min ? std::min(values[k], r.second) : std::max(values[k], -r.second);
  };
  const int kmin = static_cast<int>(std::min_element(values.begin(), values.end()) - values.begin());
  const int kmax = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
  constants_.c1 = refine(kmin, true) - 1e-9;
  constants_.c2 = refine(kmax, false) + 1e-9;
}

double ConvexBody::raw_gauge(const Vec2& xi) const {
  switch (kind_) {
    case BodyKind::Euclidean:
      return xi.norm();
    case BodyKind::Ellipse:
      return std::sqrt(std::max(0.0, xi.dot(A_ * xi)));
    case BodyKind::UserGauge:
      if (xi.x() == 0.0 && xi.y() == 0.0) return 0.0;
      return user_(xi);
  }
  return 0.0;
}

Vec2 ConvexBody::fd_gradient(const Vec2& xi) const {
  const double step = 1e-3 * xi.norm();
  Vec2 g;
  for (int i = 0; i < 2; ++i) {
    const auto central = [&](double h) {
      Vec2 p = xi, m = xi;
      p[i] += h;
      m[i] -= h;
      return (raw_gauge(p) - raw_gauge(m)) / (2 * h);
    };
    g[i] = (4.0 * central(0.5 * step) - central(step)) / 3.0;
  }
  return g;
}

Vec2 ConvexBody::raw_gradient(const Vec2& xi) const {
  switch (kind_) {
    case BodyKind::Euclidean:
      return xi / xi.norm();
    case BodyKind::Ellipse:
      return A_ * xi / raw_gauge(xi);
    case BodyKind::UserGauge:
      return fd_gradient(xi);
  }
  return Vec2::Zero();
}

double ConvexBody::raw_polar(const Vec2& x, double* argmax_angle) const {
  if (kind_ != BodyKind::UserGauge) {
    if (kind_ == BodyKind::Euclidean) return x.norm();
    return std::sqrt(std::max(0.0, x.dot(A_inv_ * x)));
  }
  const DirectionTable& t = *table_;
  const auto support_at = [&](int k) { return x.dot(t.points[((k % kN) + kN) % kN]); };

  int best = 0;
  if (t.monotone) {
    const double base = t.normal_angles.front();
    const double phi = base + wrap_angle(std::atan2(x.y(), x.x()) - base);
    const int k = static_cast<int>(
        std::upper_bound(t.normal_angles.begin(), t.normal_angles.end(), phi) - t.normal_angles.begin()) - 1;
    best = k;
    double best_val = support_at(k);
    for (int j = k - 3; j <= k + 4; ++j) {
      if (const double v = support_at(j); v > best_val) {
        best_val = v;
        best = j;
      }
    }
  } else {
    double best_val = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < kN; ++k) {
      if (const double v = support_at(k); v > best_val) {
        best_val = v;
        best = k;
      }
    }
  }

  // Local maximization of g(a) = <x, e(a)> / rho(e(a)) around the best table entry.
  const auto g = [&](double a) {
    const Vec2 e = unit_direction(a);
    return x.dot(e) / raw_gauge(e);
  };
  const double center = best * angle_step();
  const double lo = center - angle_step();
  const double hi = center + angle_step();
  double a = center;
  bool converged = false;
  constexpr double kStep = 1e-4;
  for (int it = 0; it < 30; ++it) {
    const auto d1 = [&](double h) { return (g(a + h) - g(a - h)) / (2 * h); };
    const double g1 = (4.0 * d1(0.5 * kStep) - d1(kStep)) / 3.0;
    const double g2 = (g(a + kStep) - 2.0 * g(a) + g(a - kStep)) / (kStep * kStep);
    if (!(g2 < 0)) break;
    const double next = std::clamp(a - g1 / g2, lo, hi);
    const double delta = std::abs(next - a);
    a = next;
    if (delta < 1e-11) {
      converged = true;
      break;
    }
  }
  double value = g(a);
  if (!converged || value < support_at(best)) {
    const auto r = boost::math::tools::brent_find_minima([&](double s) { return -g(s); }, lo, hi,
                                                        std::numeric_limits<double>::digits);
    if (-r.second > value) {
      value = -r.second;
      a = r.first;
    }
    if (support_at(best) > value) {
      value = support_at(best);
      a = center;
    }
  }
  if (argmax_angle) *argmax_angle = a;
  return value;
}

double ConvexBody::gauge(const Vec2& xi) const {
  require_finite(xi, "gauge");
  return raw_gauge(xi) / scale_;
}

double ConvexBody::polar_gauge(const Vec2& x) const {
  require_finite(x, "polar_gauge");
  if (x.x() == 0.0 && x.y() == 0.0) return 0.0;
  return scale_ * raw_polar(x, nullptr);
}

Vec2 ConvexBody::gauge_gradient(const Vec2& xi) const {
  require_finite(xi, "gauge_gradient");
  if (xi.x() == 0.0 && xi.y() == 0.0) throw DomainError("gauge_gradient: undefined at the origin");
  return raw_gradient(xi) / scale_;
}

Vec2 ConvexBody::polar_gauge_gradient(const Vec2& x) const {
  require_finite(x, "polar_gauge_gradient");
  if (x.x() == 0.0 && x.y() == 0.0) throw DomainError("polar_gauge_gradient: undefined at the origin");
  switch (kind_) {
    case BodyKind::Euclidean:
      return scale_ * x / x.norm();
    case BodyKind::Ellipse:
      return scale_ * A_inv_ * x / raw_polar(x, nullptr);
    case BodyKind::UserGauge: {
      // The gradient of the support function is the boundary point where it is attained.
      double a = 0.0;
      raw_polar(x, &a);
      const Vec2 e = unit_direction(a);
      return scale_ * e / raw_gauge(e);
    }
  }
  return Vec2::Zero();
}

Mat2 ConvexBody::gauge_hessian(const Vec2& xi) const {
  require_finite(xi, "gauge_hessian");
  if (xi.x() == 0.0 && xi.y() == 0.0) throw DomainError("gauge_hessian: undefined at the origin");
  switch (kind_) {
    case BodyKind::Euclidean: {
      const double r = xi.norm();
      return (Mat2::Identity() - xi * xi.transpose() / (r * r)) / (r * scale_);
    }
    case BodyKind::Ellipse: {
      const double r = raw_gauge(xi);
      const Vec2 Ax = A_ * xi;
      return (A_ - Ax * Ax.transpose() / (r * r)) / (r * scale_);
    }
    case BodyKind::UserGauge: {
      const double h = 1e-4 * xi.norm();
      Mat2 H;
      for (int j = 0; j < 2; ++j) {
        Vec2 p = xi, m = xi;
        p[j] += h;
        m[j] -= h;
        H.col(j) = (fd_gradient(p) - fd_gradient(m)) / (2 * h);
      }
      return 0.5 * (H + H.transpose()) / scale_;
    }
  }
  return Mat2::Zero();
}

Vec2 ConvexBody::boundary_point(double angle) const {
  const Vec2 e = unit_direction(angle);
  return e / gauge(e);
}

BodyValidationReport ConvexBody::validate_c2plus() const {
  BodyValidationReport report;
  std::vector<Vec2> pts(kN);
  for (int k = 0; k < kN; ++k) pts[k] = boundary_point(k * angle_step());

  report.min_curvature = std::numeric_limits<double>::infinity();
  // Signed curvature of the circle through three consecutive boundary samples.
  for (int k = 0; k < kN; ++k) {
    const Vec2& a = pts[(k + kN - 1) % kN];
    const Vec2& b = pts[k];
    const Vec2& c = pts[(k + 1) % kN];
    const double denom = (b - a).norm() * (c - b).norm() * (a - c).norm();
    const double kappa = denom > 0 ? 2.0 * cross(b - a, c - a) / denom : 0.0;
    report.min_curvature = std::min(report.min_curvature, kappa);
    if (!(kappa > 1e-6)) report.offending_angles.push_back(k * angle_step());
  }

  report.max_gradient_jump = 0.0;
  for (int k = 0; k < kN; ++k) {
    const Vec2 xi = unit_direction(k * angle_step());
    const double step = 1e-6;
    Vec2 forward, backward;
    const double g0 = gauge(xi);
    for (int i = 0; i < 2; ++i) {
      Vec2 p = xi, m = xi;
      p[i] += step;
      m[i] -= step;
      forward[i] = (gauge(p) - g0) / step;
      backward[i] = (g0 - gauge(m)) / step;
    }
    const double jump = (forward - backward).norm();
    report.max_gradient_jump = std::max(report.max_gradient_jump, jump);
    if (jump > 1e-4) report.offending_angles.push_back(k * angle_step());
  }
  std::sort(report.offending_angles.begin(), report.offending_angles.end());
  report.offending_angles.erase(std::unique(report.offending_angles.begin(), report.offending_angles.end()),
                                report.offending_angles.end());

  report.passed = report.min_curvature > 1e-6 && report.max_gradient_jump <= 1e-4;
  std::ostringstream msg;
  if (report.passed) {
    msg << "C2+ check passed";
  } else {
    msg << "body '" << name_ << "' is not of class C2+: min curvature " << report.min_curvature
        << ", max gradient jump " << report.max_gradient_jump << ", " << report.offending_angles.size()
        << " offending directions";
  }
  report.message = msg.str();
  return report;
}

}  // namespace mkt
