#pragma once

#include "mkt/boundary.hpp"
#include "mkt/convex_body.hpp"
#include "mkt/distance_field.hpp"
#include "mkt/source_field.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mkt {

/// One property checked over a sample set: `value` is the worst observed defect.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;
  std::size_t failures = 0;
  bool passed() const { return failures == 0; }
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Subadditivity and homogeneity of both gauges, the gradient duality identities, and
/// c1 |xi| <= rho(xi) <= c2 |xi|.
SuiteResult gauge_suite(const ConvexBody& body, int samples, std::uint64_t seed);

/// Tangentiality of d/ds n_rho, the ray Jacobian 1 - t k against finite differences, and
/// (euclidean body) k against the curve curvature.
SuiteResult curvature_suite(const DomainBoundary& boundary, const ConvexBody& body, int samples = 256);

/// c(0, r) = r, strict decrease on [0, 1/r], and agreement of the two branches near 0.
SuiteResult growth_factor_suite(double r, int samples, std::uint64_t seed);

/// d = 0 on the boundary, d(x) - d(y) <= rho0(x - y), and d = t along rays up to tau.
SuiteResult distance_suite(const DistanceField& field, int samples, std::uint64_t seed);

/// v_f bound and weak identity on a grid of spacing h.
SuiteResult density_suite(const DistanceField& field, const SourceField& source, double h);

/// u_f <= d on the grid and u_f = d on the support of f.
SuiteResult minimizer_suite(const DistanceField& field, const SourceField& source, double h);

}  // namespace mkt
