#pragma once

#include "mkt/distance_field.hpp"
#include "mkt/grid.hpp"
#include "mkt/source_field.hpp"

#include <optional>
#include <vector>

namespace mkt {

/// u_S(x) = max over z in S u boundary of d(z) - rho0(z - x), for S a finite union of
/// closed regions. Off S the maximiser lies on the boundary of S or of the domain, so
/// candidates are samples of those two curves (region boundaries at spacing h / 4).
class MaxConvolution {
 public:
  MaxConvolution(DistanceField field, std::vector<Region> set, double h);

  /// With refine, the best candidate is polished by a pattern search inside S.
  double value(const Vec2& x, bool refine = true) const;
  double operator()(const Vec2& x) const { return value(x); }
  /// max(1, 1 / c1): converts a Euclidean sample spacing into a bound on value error.
  double lipschitz() const;
  double resolution() const { return h_; }
  bool in_set(const Vec2& x) const;
  const std::vector<Region>& set() const { return set_; }
  const DistanceField& field() const { return field_; }
  std::size_t candidate_count() const { return region_z_.size() + field_.boundary().sample_count(); }

  GridFunction on_grid(const Grid& grid) const;

 private:
  double objective(const Vec2& z, const Vec2& x) const;

  DistanceField field_;
  std::vector<Region> set_;
  double h_;
  std::vector<Vec2> region_z_;
  std::vector<double> region_d_;
};

/// Transport rays of a closed set S. For each boundary sample, sigma is the last ray
/// parameter at which the ray point lies in S.
class RaySystem {
 public:
  static constexpr int kScanSteps = 512;

  RaySystem(DistanceField field, std::vector<Region> set);

  const std::vector<std::optional<double>>& sigma() const { return sigma_; }
  /// z*(s) = y(s) + sigma(s) D rho(nu(s)).
  std::optional<Vec2> reduced_point(int i) const;
  /// sigma on the exact ray through arclength s.
  std::optional<double> sigma_at(double s) const;

  /// rho0(z* - y) = sigma(s) when x lies on [y(s), z*(s)] for a projection y(s) of x,
  /// i.e. d(x) <= sigma(s) + tol; else 0. The maximum over projections.
  double lambda_star(const Vec2& x, double tol = 0.0) const;
  /// x in S, or x on a transport ray segment (within tol along the ray).
  bool in_extended_transport_set(const Vec2& x, double tol = 0.0) const;

  const DistanceField& field() const { return field_; }
  bool in_set(const Vec2& x) const;

 private:
  std::optional<double> scan(double s, double tau) const;

  DistanceField field_;
  std::vector<Region> set_;
  std::vector<std::optional<double>> sigma_;
};

/// u_f = u_S with S the support of f.
MaxConvolution minimal_minimizer(const DistanceField& field, const SourceField& source, double h);

struct GapEstimate {
  double gap = 0.0;  // max over active grid nodes of d - u_f
  Vec2 argmax = Vec2::Zero();
  double grid_h = 0.0;
};

GapEstimate minimizer_gap(const MaxConvolution& uf, const Grid& grid);

struct UniquenessVerdict {
  bool unique = true;
  double tolerance = 0.0;  // 2 h
  std::size_t sigma_points = 0;
  std::size_t uncovered = 0;
  std::optional<Vec2> witness;  // Sigma point farthest from supp(f)
  double witness_distance = 0.0;
  GapEstimate gap;
};

UniquenessVerdict uniqueness_verdict(const DistanceField& field, const SourceField& source, const SingularSet& sigma,
                                     double h);

}  // namespace mkt
