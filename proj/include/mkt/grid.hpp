#pragma once

#include "mkt/boundary.hpp"
#include "mkt/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace mkt {

enum class NodeMask : std::uint8_t { Outside = 0, Band = 1, Inside = 2 };

/// Cell-centred Cartesian grid over the bounding box of the domain. Node (i, j) sits at
/// origin + ((i + 0.5) h, (j + 0.5) h); index k = j * nx + i (row-major).
class Grid {
 public:
  Grid() = default;
  /// Spacing h; the node block is centred on the bounding box and extended by `pad`
  /// nodes on every side.
  static Grid with_spacing(const DomainBoundary& boundary, double h, int pad = 0);
  /// n nodes along the longer side of the bounding box.
  static Grid with_count(const DomainBoundary& boundary, int n);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return mask_.size(); }
  double spacing() const { return h_; }
  const Vec2& origin() const { return origin_; }
  Vec2 node(int i, int j) const { return origin_ + Vec2((i + 0.5) * h_, (j + 0.5) * h_); }
  Vec2 node(std::size_t k) const { return node(static_cast<int>(k % nx_), static_cast<int>(k / nx_)); }
  NodeMask mask(std::size_t k) const { return mask_[k]; }
  bool active(std::size_t k) const { return mask_[k] != NodeMask::Outside; }
  const std::vector<NodeMask>& masks() const { return mask_; }
  std::size_t active_count() const;

 private:
  void build_mask(const DomainBoundary& boundary);

  int nx_ = 0, ny_ = 0;
  double h_ = 0.0;
  Vec2 origin_ = Vec2::Zero();
  std::vector<NodeMask> mask_;
};

/// Node values on a grid; Outside nodes carry the zero trace.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.nx() + i]; }
  /// Evaluates fn at every active node (in parallel); Outside nodes get 0.
  static GridFunction sample(const Grid& grid, const std::function<double(const Vec2&)>& fn);
};

/// Discrete gradient at node k: centred differences, one-sided where a neighbour is Outside.
Vec2 grid_gradient(const GridFunction& u, std::size_t k);

}  // namespace mkt
