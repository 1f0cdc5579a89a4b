#pragma once

#include "mkt/convex_body.hpp"
#include "mkt/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mkt {

enum class BoundaryKind { Circle, Ellipse, Parametric };

struct Frame {
  Vec2 point;
  Vec2 tangent;  // unit, counterclockwise
  Vec2 normal;   // inward unit normal, rot90(tangent)
};

struct BoundingBox {
  Vec2 lo;
  Vec2 hi;
};

/// The boundary of a simply connected C^2 domain, as a closed counterclockwise curve
/// y(theta), theta in [0, 2pi). Arclength s in [0, length) is the primary coordinate;
/// boundary samples are uniform in arclength.
class DomainBoundary {
 public:
  using CurveFn = std::function<Vec2(double)>;

  static constexpr int kDefaultSamples = 2048;

  static DomainBoundary circle(double radius, const Vec2& center = Vec2::Zero(),
                               int samples = kDefaultSamples);
  static DomainBoundary ellipse(double a, double b, const Vec2& center = Vec2::Zero(),
                                int samples = kDefaultSamples);
  /// A user curve given with its first and second derivatives.
  static DomainBoundary parametric(CurveFn y, CurveFn dy, CurveFn ddy, int samples = kDefaultSamples,
                                   std::string name = "parametric");
  /// Star-shaped curve r(theta) = radius * (1 + amplitude * cos(lobes * theta)).
  static DomainBoundary polar_curve(double radius, double amplitude, int lobes,
                                    int samples = kDefaultSamples);

  BoundaryKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int sample_count() const { return static_cast<int>(points_.size()); }
  double length() const { return length_; }
  /// Arclength spacing of the boundary samples.
  double sample_spacing() const { return length_ / sample_count(); }
  double diameter() const { return diameter_; }
  double area() const { return area_; }
  const BoundingBox& bounding_box() const { return bbox_; }

  const std::vector<Vec2>& sample_points() const { return points_; }
  const std::vector<double>& sample_params() const { return params_; }
  double sample_arclength(int i) const { return i * sample_spacing(); }

  /// Parameterization and its derivatives in theta.
  Vec2 curve(double theta) const;
  Vec2 curve_d1(double theta) const;
  Vec2 curve_d2(double theta) const;

  double arclength_of_param(double theta) const;
  double param_of_arclength(double s) const;
  /// Reduces s into [0, length).
  double wrap_arclength(double s) const;
  /// Shortest signed difference a - b along the closed curve.
  double arclength_gap(double a, double b) const;

  Frame frame(double s) const;
  Frame frame_at_param(double theta) const;
  /// Signed Euclidean curvature, positive where the domain is locally convex.
  double euclidean_curvature(double s) const;

  /// Closed-domain membership: winding number on the sampled polygon, with points
  /// within edge_tolerance() of the polygon counted as inside.
  bool contains(const Vec2& x) const;
  /// 1e-9 plus the largest chord-to-curve gap of the sampled polygon.
  double edge_tolerance() const { return edge_tol_; }
  /// Euclidean distance from x to the sampled polygon.
  double polygon_distance(const Vec2& x) const;

 private:
  struct Slabs;

  DomainBoundary() = default;
  void build(int samples);
  void validate_parametric() const;

  BoundaryKind kind_ = BoundaryKind::Circle;
  std::string name_;
  double radius_ = 1.0, semi_a_ = 1.0, semi_b_ = 1.0;
  Vec2 center_ = Vec2::Zero();
  CurveFn y_, dy_, ddy_;

  std::vector<double> table_theta_;  // uniform theta panels
  std::vector<double> table_s_;      // cumulative arclength at panel starts
  std::vector<Vec2> points_;
  std::vector<double> params_;
  double length_ = 0.0;
  double diameter_ = 0.0;
  double area_ = 0.0;
  double edge_tol_ = 1e-9;
  BoundingBox bbox_;
  std::shared_ptr<const Slabs> slabs_;
};

/// Cahn-Hoffman field n_rho = -D rho(nu) and ray direction D rho(nu) at arclength s.
struct CahnHoffman {
  Vec2 n_rho;
  Vec2 ray_dir;
};

CahnHoffman cahn_hoffman(const DomainBoundary& boundary, const ConvexBody& body, double s);

/// d/ds n_rho by a five-point central stencil with step length/N_b.
Vec2 cahn_hoffman_derivative(const DomainBoundary& boundary, const ConvexBody& body, double s);

/// Anisotropic curvature: the tangential component of d/ds n_rho.
double anisotropic_curvature(const DomainBoundary& boundary, const ConvexBody& body, double s);

struct MinCurvature {
  double value;
  double arclength;
};

/// H0 = min of the anisotropic curvature over the boundary (planar case: H = kappa).
MinCurvature min_mean_curvature(const DomainBoundary& boundary, const ConvexBody& body);

/// Max of |anisotropic curvature| over the boundary samples.
double max_abs_curvature(const DomainBoundary& boundary, const ConvexBody& body);

/// y(s) + t * D rho(nu(s)).
Vec2 ray_point(const DomainBoundary& boundary, const ConvexBody& body, double s, double t);

}  // namespace mkt
