#pragma once

#include "mkt/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mkt {

enum class BodyKind { Euclidean, Ellipse, UserGauge };

/// Constants with c1|xi| <= gauge(xi) <= c2|xi|.
struct EnclosingConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

struct BodyValidationReport {
  bool passed = false;
  double min_curvature = 0.0;     // of the sampled level set {gauge = 1}
  double max_gradient_jump = 0.0; // one-sided gradient mismatch
  std::vector<double> offending_angles;
  std::string message;
};

/// A planar convex body K containing the origin in its interior, described by its
/// gauge rho(xi) = inf{t >= 0 : xi in tK} and the polar gauge rho0(x) = max_{xi in K} <x, xi>.
///
/// Euclidean and ellipse bodies use closed forms. A user gauge is any positively
/// 1-homogeneous convex function; its polar gauge is evaluated on a table of 4096
/// boundary directions followed by a local Newton refinement, and its gradient by
/// Richardson-extrapolated central differences. Bodies need not be symmetric, so
/// callers must keep the argument order of rho0(x - y).
///
/// Immutable after construction; all members are safe for concurrent reads.
class ConvexBody {
 public:
  using GaugeFn = std::function<double(const Vec2&)>;

  static constexpr int kDirectionCount = 4096;

  static ConvexBody euclidean();
  /// K = {xi : xi^T A xi <= 1} for symmetric positive definite A.
  static ConvexBody ellipse(const Mat2& A);
  static ConvexBody user(GaugeFn gauge, std::string name = "user");
  /// rho(xi) = |xi| + <b, xi>, |b| < 1: a smooth non-symmetric body.
  static ConvexBody randers(const Vec2& b);
  /// rho(xi) = max(|xi_1|, |xi_2|). Not of class C^2_+; fails validate_c2plus().
  static ConvexBody max_norm();

  /// The dilated body factor * K.
  ConvexBody scaled(double factor) const;

  BodyKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Mat2& matrix() const { return A_; }

  double gauge(const Vec2& xi) const;
  double polar_gauge(const Vec2& x) const;
  /// D rho(xi), a point of the polar boundary. Throws DomainError at xi = 0.
  Vec2 gauge_gradient(const Vec2& xi) const;
  /// D rho0(x), a point of the boundary of K. Throws DomainError at x = 0.
  Vec2 polar_gauge_gradient(const Vec2& x) const;
  Mat2 gauge_hessian(const Vec2& xi) const;

  /// Point of the boundary of K in direction angle.
  Vec2 boundary_point(double angle) const;

  EnclosingConstants enclosing_constants() const { return constants_; }
  BodyValidationReport validate_c2plus() const;

 private:
  struct DirectionTable;

  ConvexBody() = default;
  void finish_construction();

  double raw_gauge(const Vec2& xi) const;
  double raw_polar(const Vec2& x, double* argmax_angle) const;
  Vec2 raw_gradient(const Vec2& xi) const;
  Vec2 fd_gradient(const Vec2& xi) const;

  BodyKind kind_ = BodyKind::Euclidean;
  std::string name_;
  Mat2 A_ = Mat2::Identity();
  Mat2 A_inv_ = Mat2::Identity();
  GaugeFn user_;
  std::shared_ptr<const DirectionTable> table_;
  double scale_ = 1.0;
  EnclosingConstants constants_;
};

}  // namespace mkt
