#pragma once

#include "mkt/boundary.hpp"
#include "mkt/convex_body.hpp"
#include "mkt/types.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace mkt {

struct Projection {
  double arclength = 0.0;
  double param = 0.0;
  Vec2 point = Vec2::Zero();
  double value = 0.0;  // rho0(x - point)
};

/// Per-point record of the anisotropic distance from the boundary.
struct DistanceSample {
  Vec2 x = Vec2::Zero();
  double d = 0.0;
  std::vector<Projection> projections;
  bool singular = false;
  std::optional<Vec2> grad_d;
  double tau = 0.0;
  std::optional<Vec2> cut_point;
};

struct DistanceOptions {
  double projection_tol_rel = 1e-7;  // value ties, relative to diam
  double merge_tol = 1e-6;           // arclength merge distance for projections
  int max_representatives = 16;
};

struct CutTime {
  double tau = 0.0;
  std::optional<Vec2> cut_point;
};

/// Sampled singular set with neighbour lists (points within twice the resolution).
struct SingularSet {
  std::vector<Vec2> points;
  std::vector<std::vector<int>> adjacency;
  double resolution = 0.0;
};

/// d(x) = min over boundary points y of rho0(x - y), with projections, gradient,
/// cut times and the singular set. Minimization is a sweep over the boundary
/// samples followed by a local refinement of every candidate minimum.
///
/// Const queries are thread-safe; the boundary cut-time table and the inradius are
/// filled lazily, once.
class DistanceField {
 public:
  DistanceField(ConvexBody body, DomainBoundary boundary, DistanceOptions options = {});

  const ConvexBody& body() const { return body_; }
  const DomainBoundary& boundary() const { return boundary_; }
  const DistanceOptions& options() const { return options_; }
  /// Value-tie tolerance: projection_tol_rel * diam.
  double projection_tolerance() const { return delta_proj_; }

  /// d and the projection set. Throws DomainError outside the closed domain.
  DistanceSample distance(const Vec2& x) const;
  double value(const Vec2& x) const;
  /// d, projections, gradient, tau and cut point.
  DistanceSample sample(const Vec2& x) const;

  /// D rho0(x - y) for the unique projection y. Throws SingularPointError on the singular set.
  Vec2 gradient_d(const Vec2& x) const;

  /// Cut time of the boundary point at arclength s, by bisection on "y(s) is still a projection".
  double cut_time_boundary(double s) const;
  /// Cut time from the per-sample table, periodic cubic interpolation.
  double tau_at(double s) const;
  const std::vector<double>& tau_table() const;
  CutTime cut_time_interior(const Vec2& x) const;
  /// Minimum of the tabulated boundary cut times (a positive lower bound diagnostic).
  double min_boundary_tau() const;

  /// Number of distinct refined minima of rho0(x - y(s)) within tol of the minimum. A set of
  /// tol-minimisers spreading farther than d/2 (a near-continuum) counts as two.
  int count_projections(const Vec2& x, double tol) const;

  SingularSet singular_set(double h) const;
  double inradius() const;
  /// A point where the inradius is attained.
  Vec2 incenter() const;

  /// Anisotropic curvature at boundary sample i (cached).
  double sample_curvature(int i) const { return sample_kappa_[i]; }
  double max_abs_curvature() const { return max_abs_kappa_; }

 private:
  struct Cache;
  struct Minimum {
    double value;
    double param;
  };

  std::vector<Minimum> refined_minima(const Vec2& x, double tol) const;
  bool distance_below(const Vec2& x, double threshold) const;
  Minimum refine(const Vec2& x, int i) const;
  std::vector<Projection> to_projections(const std::vector<Minimum>& minima) const;

  ConvexBody body_;
  DomainBoundary boundary_;
  DistanceOptions options_;
  double delta_proj_ = 0.0;
  std::vector<double> sample_kappa_;
  double max_abs_kappa_ = 0.0;
  std::shared_ptr<Cache> cache_;
};

}  // namespace mkt
