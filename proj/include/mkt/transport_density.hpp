#pragma once

#include "mkt/distance_field.hpp"
#include "mkt/grid.hpp"
#include "mkt/source_field.hpp"

#include <vector>

namespace mkt {

/// c(t, r) = (1 - (1 - t r)^n) / (n t), and r at t = 0. Uses the series branch
/// when |t r| < 1e-6.
double growth_factor(double t, double r, int n = 2);
/// The two branches, exposed for consistency checks.
double growth_factor_closed(double t, double r, int n = 2);
double growth_factor_series(double t, double r, int n = 2);

struct DensityValue {
  double value = 0.0;
  double error = 0.0;  // quadrature error estimate
  bool singular = false;
};

struct DensityOptions {
  double rel_tol = 1e-8;  // absolute tolerance is rel_tol * ||f||_inf * tau(x)
  int max_depth = 20;
};

/// v_f(x): integral over [0, tau(x)] of f(x + t D rho(nu(y))) (1 - (d + t) k) / (1 - d k),
/// k the anisotropic curvature at the projection y. Zero on the singular set.
DensityValue transport_density(const DistanceField& field, const SourceField& source, const Vec2& x,
                               const DensityOptions& options = {});

/// v_f at the active nodes of a grid (0 elsewhere and on singular nodes).
GridFunction transport_density_grid(const DistanceField& field, const SourceField& source, const Grid& grid,
                                    const DensityOptions& options = {});

/// psi((x - c) / w) with psi(u) = prod (1 - u_i^2)^3 on |u_i| < 1.
struct Bump {
  Vec2 center;
  double width;
  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  /// Whether the closed support square lies in the domain.
  bool inside(const DomainBoundary& boundary) const;
};

/// 3 x 3 lattice of centres spaced 0.3 r around the incenter, widths {0.2, 0.4} r.
std::vector<Bump> standard_bumps(const DistanceField& field);

struct WeakIdentityEntry {
  Bump bump;
  double flux = 0.0;    // integral of v_f <D rho(Dd), D phi>
  double source = 0.0;  // integral of f phi
  double residual = 0.0;  // |flux - source| / (||f||_inf area)
};

struct WeakIdentityReport {
  std::vector<WeakIdentityEntry> entries;
  double max_residual = 0.0;
  double grid_h = 0.0;
  double normalization = 0.0;
  std::size_t singular_nodes = 0;
};

WeakIdentityReport verify_weak_identity(const DistanceField& field, const SourceField& source,
                                        const std::vector<Bump>& bumps, double h);

struct DensityBoundReport {
  double max_density = 0.0;
  Vec2 argmax = Vec2::Zero();
  double sup_f = 0.0;
  double H0 = 0.0;
  double inradius = 0.0;
  double bound = 0.0;  // sup_f * c(H0, inradius)
  double rel_slack = 1e-6;
  bool passed = false;
  double interior_max = 0.0;  // over nodes with d >= 0.05 inradius
  double interior_margin = 0.0;
  bool interior_strict = false;
  double grid_h = 0.0;
};

DensityBoundReport density_bound_check(const DistanceField& field, const SourceField& source, double h);

}  // namespace mkt
