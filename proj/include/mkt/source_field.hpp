#pragma once

#include "mkt/boundary.hpp"
#include "mkt/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mkt {

enum class RegionKind { Disk, HalfPlane, Box, Polygon, Sector, Spiral, Domain };

/// A closed primitive region of the plane. Membership uses non-strict inequalities.
class Region {
 public:
  static Region disk(const Vec2& center, double radius);
  /// {x : <n, x> <= b}
  static Region half_plane(const Vec2& n, double b);
  static Region box(const Vec2& lo, const Vec2& hi);
  static Region polygon(std::vector<Vec2> vertices);
  /// Polar rectangle: angle in [theta1, theta2] (counterclockwise), radius in [r1, r2].
  /// theta2 - theta1 >= 2 pi gives a full annulus.
  static Region sector(const Vec2& center, double theta1, double theta2, double r1, double r2);
  /// {c + r e(theta) : theta in [0, 2 pi), a + b theta <= r <= r2}.
  static Region spiral(const Vec2& center, double a, double b, double r2);
  /// The closed domain itself.
  static Region domain(const DomainBoundary& boundary);

  RegionKind kind() const { return kind_; }
  std::string kind_name() const;
  const std::vector<double>& parameters() const { return params_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }

  bool contains(const Vec2& x) const;
  /// Euclidean distance to the region (0 inside).
  double distance(const Vec2& x) const;
  /// Points on the region boundary at roughly the given spacing; unbounded pieces are cut
  /// to the box.
  std::vector<Vec2> boundary_samples(double spacing, const BoundingBox& clip) const;
  /// Ray parameters in (t0, t1) where membership of a + t dir changes, located by a
  /// 256-step scan and bisection.
  std::vector<double> crossings(const Vec2& a, const Vec2& dir, double t0, double t1) const;

 private:
  Region() = default;
  double outline_distance(const Vec2& x) const;

  RegionKind kind_ = RegionKind::Disk;
  std::vector<double> params_;
  std::vector<Vec2> vertices_;
  std::vector<std::vector<Vec2>> outline_;  // dense boundary polylines for sector, spiral
  std::shared_ptr<const DomainBoundary> domain_;
};

/// Nonnegative bounded source f. Either a sum of constant terms value_i * 1_{R_i}, or a
/// custom evaluator with an explicit support descriptor, or a combination of both.
class SourceField {
 public:
  using Fn = std::function<double(const Vec2&)>;

  struct Term {
    double value;
    Region region;
  };

  SourceField() = default;
  static SourceField zero();
  static SourceField constant(double value, const Region& region);
  static SourceField piecewise(std::vector<Term> terms);
  /// f is evaluated by fn, which must vanish outside the union of support.
  static SourceField custom(Fn fn, std::vector<Region> support, std::string name = "custom");

  double operator()(const Vec2& x) const { return evaluate(x); }
  double evaluate(const Vec2& x) const;

  /// Union of the closed regions carrying the source.
  const std::vector<Region>& support() const { return support_; }
  bool in_support(const Vec2& x) const;
  double support_distance(const Vec2& x) const;
  const std::vector<Term>& terms() const { return terms_; }
  bool has_custom() const { return static_cast<bool>(custom_); }
  bool is_zero() const { return support_.empty(); }

  /// ||f||_inf estimate: exact term sums at sampled points of the grid and of region
  /// boundaries inside the domain, cached per domain.
  double sup_norm(const DomainBoundary& boundary) const;

  SourceField scaled(double factor) const;
  /// f + g.
  SourceField plus(const SourceField& other) const;

  /// Breakpoints of f along a segment: boundary crossings of the term regions.
  std::vector<double> breakpoints(const Vec2& a, const Vec2& dir, double t0, double t1) const;

 private:
  std::vector<Term> terms_;
  Fn custom_;
  std::vector<Region> custom_support_;
  std::vector<Region> support_;
  std::string name_;
  struct SupCache;
  std::shared_ptr<SupCache> sup_cache_;
};

}  // namespace mkt
