#pragma once

#include "mkt/distance_field.hpp"
#include "mkt/grid.hpp"
#include "mkt/minimizer.hpp"
#include "mkt/source_field.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mkt {

enum class LagrangianKind { Indicator, Hinge, Power, Radial };

/// h(xi) = g(rho(xi)) for a radial profile g. Indicator: 0 on K, +inf outside.
/// Hinge: L0 max(rho - 1, 0). Power: rho^p / p, used only for the p-Laplace problems.
class Lagrangian {
 public:
  using Profile = std::function<double(double)>;

  static Lagrangian indicator();
  static Lagrangian hinge(double lambda0);
  static Lagrangian power(double p);
  /// g must be nonnegative and vanish at 1.
  static Lagrangian radial(Profile g, std::string name = "radial");

  LagrangianKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double parameter() const { return param_; }

  double profile(double rho) const;
  double operator()(const ConvexBody& body, const Vec2& xi) const { return profile(body.gauge(xi)); }

 private:
  Lagrangian() = default;

  LagrangianKind kind_ = LagrangianKind::Indicator;
  double param_ = 0.0;
  Profile g_;
  std::string name_;
};

struct GrowthConstant {
  double value = 0.0;  // +inf for the indicator
  bool exact = true;
  /// Smallest sampled rho - 1 when the value is a sampled infimum (an upper estimate of
  /// the true infimum, reported with its floor).
  double sampling_floor = 0.0;
};

/// Largest lambda with h(xi) >= lambda (rho(xi) - 1). Power kind: ConfigurationError.
GrowthConstant growth_constant(const Lagrangian& h, const ConvexBody& body);

struct H3Report {
  double Lambda = 0.0;
  double H0 = 0.0;
  double inradius = 0.0;
  double sup_f = 0.0;
  double c = 0.0;    // c(H0, inradius)
  double lhs = 0.0;  // c * sup_f
  double margin = 0.0;  // Lambda - lhs
  double rel_tol = 1e-6;
  bool passed = false;
  bool convex_sufficient = false;  // inradius * sup_f <= Lambda
};

/// c(H0, r) ||f|| <= Lambda, passing within rel_tol (H0 and r are computed values).
H3Report check_h3(const Lagrangian& h, const SourceField& source, const DistanceField& field);

struct FunctionalReport {
  double value = 0.0;
  double lagrangian_part = 0.0;
  double source_part = 0.0;  // integral of f u
  std::size_t infeasible_nodes = 0;  // rho(Du) > 1 + tol_K
  std::size_t nodes = 0;
  double max_rho = 0.0;
  double tol_K = 0.0;
  double grid_h = 0.0;
};

/// Feasibility tolerance 5 h times the curvature scale max(max |k|, 1 / r).
double feasibility_tolerance(const DistanceField& field, double h);

/// J(u) = sum over active nodes of h^2 (h(Du) - f u). Indicator kind is +inf when any node
/// has rho(Du) > 1 + tol_K. Power kind: ConfigurationError.
FunctionalReport functional_J(const GridFunction& u, const Lagrangian& h, const SourceField& source,
                              const ConvexBody& body, double tol_K);
FunctionalReport functional_J(const GridFunction& u, const Lagrangian& h, const SourceField& source,
                              const DistanceField& field);

struct Perturbation {
  std::string type;  // "bump" or "mixture"
  Vec2 center = Vec2::Zero();
  double width = 0.0;
  double epsilon = 0.0;
  double J = 0.0;
  bool violation = false;
};

struct MinimalityReport {
  double J_d = 0.0;
  double J_uf = 0.0;
  double tol_J = 0.0;
  bool uf_matches = false;  // |J(u_f) - J(d)| <= tol_J
  std::size_t violations = 0;
  std::vector<Perturbation> trials;
  double grid_h = 0.0;
  std::uint64_t seed = 0;
};

/// `trials` bump perturbations d + eps phi with eps in {0.01, 0.05, 0.1} r and random sign,
/// plus three mixtures u_f + s (d - u_f). Requires check_h3 to pass.
MinimalityReport minimality_test(const DistanceField& field, const Lagrangian& h, const SourceField& source,
                                 int trials, double grid_h, std::uint64_t seed);

struct PLaplaceOptions {
  enum class Method { Newton, Accelerated };
  Method method = Method::Newton;
  double rel_energy_tol = 1e-10;
  int max_iterations = 200;  // Newton steps; the accelerated method uses 1e5
  /// Warm start (values on the same grid); zero when absent.
  const GridFunction* initial = nullptr;
};

struct PLaplaceResult {
  GridFunction u;
  double energy = 0.0;
  int iterations = 0;
  double residual = 0.0;  // gradient norm at exit
  std::string method;
};

/// Minimises the discrete J_p(u) = sum_T |T| rho(Du)^p / p - sum h^2 f u over continuous
/// piecewise-linear u on the grid triangulation, u = 0 at Outside nodes.
PLaplaceResult plaplace_solve(const DistanceField& field, const SourceField& source, double p, const Grid& grid,
                              const PLaplaceOptions& options = {});

/// The discrete J_p and its gradient; exposed for derivative checks.
double plaplace_energy(const ConvexBody& body, const SourceField& source, double p, const GridFunction& u,
                       std::vector<double>* gradient = nullptr);

struct SweepRow {
  double p = 0.0;
  double sup_error = 0.0;  // max |u_p - d| over active nodes
  double l1_error = 0.0;
  double energy = 0.0;
  int iterations = 0;
  GridFunction u;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool asserted = false;  // monotone check applies (uniqueness holds, >= 2 rows)
  bool monotone = true;   // sup error non-increasing within slack
  double slack = 1e-3;
  double grid_h = 0.0;
};

/// Solves along p_list (warm-started) on a grid of spacing h padded by one node.
SweepReport plaplace_sweep(const DistanceField& field, const SourceField& source, const std::vector<double>& p_list,
                           double h, bool unique);

}  // namespace mkt
