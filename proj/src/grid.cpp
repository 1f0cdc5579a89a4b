#include "mkt/grid.hpp"

#include "mkt/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace mkt {

Grid Grid::with_spacing(const DomainBoundary& boundary, double h, int pad) {
  if (!(h > 0) || !std::isfinite(h)) throw InputError("grid: spacing must be positive");
  const BoundingBox& bb = boundary.bounding_box();
  const Vec2 ext = bb.hi - bb.lo;
  Grid g;
  g.h_ = h;
  g.nx_ = std::max(1, static_cast<int>(std::ceil(ext.x() / h - 1e-9)));
  g.ny_ = std::max(1, static_cast<int>(std::ceil(ext.y() / h - 1e-9)));
  if (pad < 0) throw InputError("grid: padding must be >= 0");
  g.nx_ += 2 * pad;
  g.ny_ += 2 * pad;
  g.origin_ = 0.5 * (bb.lo + bb.hi) - 0.5 * h * Vec2(g.nx_, g.ny_);
  g.build_mask(boundary);
  return g;
}

Grid Grid::with_count(const DomainBoundary& boundary, int n) {
  if (n < 2) throw InputError("grid: need at least two nodes per side");
  const BoundingBox& bb = boundary.bounding_box();
  return with_spacing(boundary, (bb.hi - bb.lo).maxCoeff() / n);
}

void Grid::build_mask(const DomainBoundary& boundary) {
  mask_.assign(static_cast<std::size_t>(nx_) * ny_, NodeMask::Outside);
  parallel_for(mask_.size(), [&](std::size_t k) {
    if (boundary.contains(node(k))) mask_[k] = NodeMask::Inside;
  });
  std::vector<NodeMask> out = mask_;
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx_ + i;
      if (mask_[k] == NodeMask::Outside) continue;
      const auto outside = [&](int a, int b) {
        return a < 0 || b < 0 || a >= nx_ || b >= ny_ || mask_[static_cast<std::size_t>(b) * nx_ + a] == NodeMask::Outside;
      };
      if (outside(i - 1, j) || outside(i + 1, j) || outside(i, j - 1) || outside(i, j + 1)) out[k] = NodeMask::Band;
    }
  mask_ = std::move(out);
}

std::size_t Grid::active_count() const {
  return static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(), [](NodeMask m) { return m != NodeMask::Outside; }));
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(const Vec2&)>& fn) {
  GridFunction u{grid, std::vector<double>(grid.size(), 0.0)};
  parallel_for(grid.size(), [&](std::size_t k) {
    if (grid.active(k)) u.values[k] = fn(grid.node(k));
  });
  return u;
}

Vec2 grid_gradient(const GridFunction& u, std::size_t k) {
  const Grid& g = u.grid;
  const int i = static_cast<int>(k % g.nx()), j = static_cast<int>(k / g.nx());
  const double h = g.spacing();
  const auto active = [&](int a, int b) {
    return a >= 0 && b >= 0 && a < g.nx() && b < g.ny() && g.active(static_cast<std::size_t>(b) * g.nx() + a);
  };
  const auto partial = [&](int di, int dj) {
    const bool fwd = active(i + di, j + dj), bwd = active(i - di, j - dj);
    const double c = u.at(i, j);
    if (fwd && bwd) return (u.at(i + di, j + dj) - u.at(i - di, j - dj)) / (2 * h);
    if (fwd) return (u.at(i + di, j + dj) - c) / h;
    if (bwd) return (c - u.at(i - di, j - dj)) / h;
    return 0.0;
  };
  return {partial(1, 0), partial(0, 1)};
}

}  // namespace mkt
