#include "mkt/variational.hpp"

#include "mkt/transport_density.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace mkt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Lagrangian Lagrangian::indicator() {
  Lagrangian h;
  h.kind_ = LagrangianKind::Indicator;
  h.name_ = "indicator";
  return h;
}

Lagrangian Lagrangian::hinge(double lambda0) {
  if (!(lambda0 >= 0) || !std::isfinite(lambda0)) throw InputError("hinge: Lambda0 must be finite and >= 0");
  Lagrangian h;
  h.kind_ = LagrangianKind::Hinge;
  h.param_ = lambda0;
  h.name_ = "hinge";
  return h;
}

Lagrangian Lagrangian::power(double p) {
  if (!(p > 1) || !std::isfinite(p)) throw InputError("power: exponent must exceed 1");
  Lagrangian h;
  h.kind_ = LagrangianKind::Power;
  h.param_ = p;
  h.name_ = "power";
  return h;
}

Lagrangian Lagrangian::radial(Profile g, std::string name) {
  if (!g) throw InputError("radial: empty profile");
  if (std::abs(g(1.0)) > 1e-12) throw ConfigurationError("radial: profile must vanish on the boundary of K");
  for (int k = 0; k <= 1000; ++k) {
    const double r = 4.0 * k / 1000;
    if (!(g(r) >= 0)) throw ConfigurationError("radial: profile must be nonnegative");
  }
  Lagrangian h;
  h.kind_ = LagrangianKind::Radial;
  h.g_ = std::move(g);
  h.name_ = std::move(name);
  return h;
}

double Lagrangian::profile(double rho) const {
  switch (kind_) {
    case LagrangianKind::Indicator: return rho <= 1.0 ? 0.0 : kInf;
    case LagrangianKind::Hinge: return param_ * std::max(rho - 1.0, 0.0);
    case LagrangianKind::Power: return std::pow(rho, param_) / param_;
    case LagrangianKind::Radial: return g_(rho);
  }
  return 0.0;
}

GrowthConstant growth_constant(const Lagrangian& h, const ConvexBody& body) {
  switch (h.kind()) {
    case LagrangianKind::Indicator: return {kInf, true, 0.0};
    case LagrangianKind::Hinge: return {h.parameter(), true, 0.0};
    case LagrangianKind::Power:
      throw ConfigurationError("growth_constant: the power Lagrangian is reserved for the p-Laplace problems");
    case LagrangianKind::Radial: break;
  }
  constexpr int kRadii = 1000, kDirections = 256;
  constexpr double kFloor = 1e-6, kTop = 999.0;
  double best = kInf;
  for (int a = 0; a < kDirections; ++a) {
    const Vec2 e = unit_direction(kTwoPi * a / kDirections);
    const Vec2 unit = e / body.gauge(e);
    for (int k = 0; k < kRadii; ++k) {
      const double excess = kFloor * std::pow(kTop / kFloor, static_cast<double>(k) / (kRadii - 1));
      const double rho = 1.0 + excess;
      best = std::min(best, h(body, rho * unit) / excess);
    }
  }
  return {best, false, kFloor};
}

H3Report check_h3(const Lagrangian& h, const SourceField& source, const DistanceField& field) {
  H3Report r;
  r.Lambda = growth_constant(h, field.body()).value;
  r.H0 = min_mean_curvature(field.boundary(), field.body()).value;
  r.inradius = field.inradius();
  r.sup_f = source.sup_norm(field.boundary());
  r.c = growth_factor(r.H0, r.inradius);
  r.lhs = r.c * r.sup_f;
  r.margin = r.Lambda - r.lhs;
  r.passed = r.lhs <= r.Lambda * (1 + r.rel_tol);
  r.convex_sufficient = r.inradius * r.sup_f <= r.Lambda * (1 + r.rel_tol);
  return r;
}

double feasibility_tolerance(const DistanceField& field, double h) {
  return 5.0 * h * std::max(field.max_abs_curvature(), 1.0 / field.inradius());
}

FunctionalReport functional_J(const GridFunction& u, const Lagrangian& h, const SourceField& source,
                              const ConvexBody& body, double tol_K) {
  if (h.kind() == LagrangianKind::Power)
    throw ConfigurationError("functional_J: the power Lagrangian is reserved for the p-Laplace problems");
  const Grid& g = u.grid;
  FunctionalReport rep;
  rep.tol_K = tol_K;
  rep.grid_h = g.spacing();
  const double cell = g.spacing() * g.spacing();
  for (int j = 0; j < g.ny(); ++j) {
    double lag = 0.0, src = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * g.nx() + i;
      if (!g.active(k)) continue;
      ++rep.nodes;
      const double rho = body.gauge(grid_gradient(u, k));
      rep.max_rho = std::max(rep.max_rho, rho);
      if (rho > 1.0 + tol_K) ++rep.infeasible_nodes;
      if (h.kind() != LagrangianKind::Indicator) lag += h.profile(rho);
      src += source(g.node(k)) * u.values[k];
    }
    rep.lagrangian_part += lag * cell;
    rep.source_part += src * cell;
  }
  if (h.kind() == LagrangianKind::Indicator && rep.infeasible_nodes > 0)
    rep.value = kInf;
  else
    rep.value = rep.lagrangian_part - rep.source_part;
  return rep;
}

FunctionalReport functional_J(const GridFunction& u, const Lagrangian& h, const SourceField& source,
                              const DistanceField& field) {
  return functional_J(u, h, source, field.body(), feasibility_tolerance(field, u.grid.spacing()));
}

MinimalityReport minimality_test(const DistanceField& field, const Lagrangian& h, const SourceField& source,
                                 int trials, double grid_h, std::uint64_t seed) {
  const H3Report h3 = check_h3(h, source, field);
  if (!h3.passed) throw ConfigurationError("minimality_test: the existence condition c(H0, r) ||f|| <= Lambda fails for this Lagrangian and source");
  const DomainBoundary& b = field.boundary();
  const Grid grid = Grid::with_spacing(b, grid_h);
  const GridFunction d = GridFunction::sample(grid, [&](const Vec2& x) { return field.value(x); });
  const GridFunction uf = minimal_minimizer(field, source, grid_h).on_grid(grid);

  MinimalityReport rep;
  rep.grid_h = grid_h;
  rep.seed = seed;
  rep.J_d = functional_J(d, h, source, field).value;
  rep.J_uf = functional_J(uf, h, source, field).value;
  rep.tol_J = std::max(1e-3 * std::abs(rep.J_d), 1e-12);
  rep.uf_matches = std::abs(rep.J_uf - rep.J_d) <= rep.tol_J;

  const double r = field.inradius();
  const BoundingBox& bb = b.bounding_box();
  std::mt19937_64 rng(seed);
  constexpr std::array<double, 3> kAmplitudes{0.01, 0.05, 0.1};
  const auto record = [&](Perturbation p, const GridFunction& u) {
    p.J = functional_J(u, h, source, field).value;
    p.violation = rep.J_d > p.J + rep.tol_J;
    rep.violations += p.violation;
    rep.trials.push_back(p);
  };
  for (int t = 0; t < trials; ++t) {
    Bump bump{};
    for (int attempt = 0;; ++attempt) {
      const Vec2 c = bb.lo + Vec2(uniform01(rng) * (bb.hi - bb.lo).x(), uniform01(rng) * (bb.hi - bb.lo).y());
      const double w = r * (0.1 + 0.3 * uniform01(rng));
      bump = {c, w};
      if (bump.inside(b)) break;
      if (attempt > 10000) throw ConfigurationError("minimality_test: no bump fits inside the domain");
    }
    const double eps = kAmplitudes[rng() % kAmplitudes.size()] * r * ((rng() & 1) ? 1.0 : -1.0);
    GridFunction u = d;
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (grid.active(k)) u.values[k] += eps * bump.value(grid.node(k));
    record({"bump", bump.center, bump.width, eps}, u);
  }
  for (double s : {0.25, 0.5, 0.75}) {
    GridFunction u = uf;
    for (std::size_t k = 0; k < grid.size(); ++k) u.values[k] += s * (d.values[k] - uf.values[k]);
    record({"mixture", Vec2::Zero(), 0.0, s}, u);
  }
  return rep;
}

namespace {

struct Triangle {
  std::array<std::ptrdiff_t, 3> unknown;  // -1 for Dirichlet nodes
  std::array<std::size_t, 3> node;
  int type;  // 0: (i,j),(i+1,j),(i+1,j+1); 1: (i,j),(i+1,j+1),(i,j+1)
};

// Rows of the local gradient operator (times h).
constexpr double kG[2][2][3] = {{{-1, 1, 0}, {0, -1, 1}}, {{0, 1, -1}, {-1, 0, 1}}};

struct Mesh {
  std::vector<Triangle> tris;
  std::vector<std::ptrdiff_t> unknown_of;  // per grid node
  std::vector<std::size_t> node_of;        // per unknown
};

Mesh build_mesh(const Grid& g) {
  Mesh m;
  m.unknown_of.assign(g.size(), -1);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.active(k)) {
      m.unknown_of[k] = static_cast<std::ptrdiff_t>(m.node_of.size());
      m.node_of.push_back(k);
    }
  for (int j = 0; j + 1 < g.ny(); ++j)
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const std::size_t a = static_cast<std::size_t>(j) * g.nx() + i, b = a + 1, c = a + g.nx() + 1, d = a + g.nx();
      for (int type = 0; type < 2; ++type) {
        Triangle t;
        t.type = type;
        t.node = type == 0 ? std::array<std::size_t, 3>{a, b, c} : std::array<std::size_t, 3>{a, c, d};
        bool any = false;
        for (int v = 0; v < 3; ++v) {
          t.unknown[v] = m.unknown_of[t.node[v]];
          any = any || t.unknown[v] >= 0;
        }
        if (any) m.tris.push_back(t);
      }
    }
  return m;
}

Vec2 tri_gradient(const Triangle& t, const std::vector<double>& u, double h) {
  Vec2 g = Vec2::Zero();
  for (int v = 0; v < 3; ++v) {
    const double val = t.unknown[v] >= 0 ? u[t.unknown[v]] : 0.0;
    g.x() += kG[t.type][0][v] * val;
    g.y() += kG[t.type][1][v] * val;
  }
  return g / h;
}

struct Problem {
  const ConvexBody& body;
  double p;
  double h;
  Mesh mesh;
  std::vector<double> load;  // h^2 f at each unknown

  double energy(const std::vector<double>& u, std::vector<double>* grad) const {
    const double area = 0.5 * h * h;
    if (grad) grad->assign(u.size(), 0.0);
    double e = 0.0;
    for (const Triangle& t : mesh.tris) {
      const Vec2 g = tri_gradient(t, u, h);
      const double rho = body.gauge(g);
      e += area * std::pow(rho, p) / p;
      if (grad && rho > 0) {
        const Vec2 dw = std::pow(rho, p - 1) * body.gauge_gradient(g);
        for (int v = 0; v < 3; ++v)
          if (t.unknown[v] >= 0)
            (*grad)[t.unknown[v]] += area * (dw.x() * kG[t.type][0][v] + dw.y() * kG[t.type][1][v]) / h;
      }
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
      e -= load[i] * u[i];
      if (grad) (*grad)[i] -= load[i];
    }
    return e;
  }

  Mat2 w_hessian(const Vec2& g) const {
    const double rho = body.gauge(g);
    if (rho < 1e-14) {
      if (p > 2 + 1e-12) return Mat2::Zero();
      const Vec2 e(1.0, 0.0);
      return hessian_at(e, std::max(rho, 1e-8));
    }
    return hessian_at(g, p < 2 ? std::max(rho, 1e-8) : rho);
  }

  // rho^{p-2} ((p-1) D rho D rho^T + rho D^2 rho), the direction taken from xi.
  Mat2 hessian_at(const Vec2& xi, double rho) const {
    const Vec2 dr = body.gauge_gradient(xi);
    const Mat2 hr = body.gauge_hessian(xi) * body.gauge(xi);
    return std::pow(rho, p - 2) * ((p - 1) * dr * dr.transpose() + hr);
  }

  Eigen::SparseMatrix<double> hessian(const std::vector<double>& u) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.tris.size() * 9 + u.size());
    const double area = 0.5 * h * h;
    double diag_max = 0.0;
    for (const Triangle& t : mesh.tris) {
      const Mat2 H = w_hessian(tri_gradient(t, u, h));
      for (int a = 0; a < 3; ++a) {
        if (t.unknown[a] < 0) continue;
        const Vec2 ga(kG[t.type][0][a] / h, kG[t.type][1][a] / h);
        for (int b = 0; b < 3; ++b) {
          if (t.unknown[b] < 0) continue;
          const Vec2 gb(kG[t.type][0][b] / h, kG[t.type][1][b] / h);
          const double v = area * ga.dot(H * gb);
          trip.emplace_back(t.unknown[a], t.unknown[b], v);
          if (a == b) diag_max = std::max(diag_max, v);
        }
      }
    }
    const double shift = 1e-12 * std::max(diag_max, 1e-300);
    for (std::size_t i = 0; i < u.size(); ++i) trip.emplace_back(i, i, shift);
    Eigen::SparseMatrix<double> H(u.size(), u.size());
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

Problem make_problem(const ConvexBody& body, const SourceField& source, double p, const Grid& grid) {
  Problem pr{body, p, grid.spacing(), build_mesh(grid), {}};
  pr.load.resize(pr.mesh.node_of.size());
  for (std::size_t i = 0; i < pr.load.size(); ++i)
    pr.load[i] = grid.spacing() * grid.spacing() * source(grid.node(pr.mesh.node_of[i]));
  return pr;
}

std::vector<double> gather(const Problem& pr, const GridFunction* u) {
  std::vector<double> x(pr.mesh.node_of.size(), 0.0);
  if (u)
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = u->values.at(pr.mesh.node_of[i]);
  return x;
}

GridFunction scatter(const Problem& pr, const Grid& grid, const std::vector<double>& x) {
  GridFunction u{grid, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t i = 0; i < x.size(); ++i) u.values[pr.mesh.node_of[i]] = x[i];
  return u;
}

void solve_newton(const Problem& pr, std::vector<double>& x, const PLaplaceOptions& opt, PLaplaceResult& res) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  std::vector<double> grad, trial(x.size());
  double e = pr.energy(x, &grad);
  bool analysed = false;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const Eigen::SparseMatrix<double> H = pr.hessian(x);
    if (!analysed) {
      ldlt.analyzePattern(H);
      analysed = true;
    }
    ldlt.factorize(H);
    if (ldlt.info() != Eigen::Success) throw IterationLimitError("plaplace: Hessian factorisation failed", norm(grad));
    const Eigen::Map<const Eigen::VectorXd> g(grad.data(), static_cast<Eigen::Index>(grad.size()));
    const Eigen::VectorXd step = -ldlt.solve(g);
    const double decrement = -g.dot(step);
    res.iterations = it;
    if (!(decrement > 0)) break;
    double alpha = 1.0, e_new = e;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + alpha * step[static_cast<Eigen::Index>(i)];
      e_new = pr.energy(trial, nullptr);
      if (e_new <= e - 1e-4 * alpha * decrement) break;
      alpha *= 0.5;
    }
    if (!(e_new < e)) break;
    x.swap(trial);
    const double drop = e - e_new;
    e = pr.energy(x, &grad);
    if (drop <= opt.rel_energy_tol * std::abs(e) && 0.5 * decrement <= opt.rel_energy_tol * std::abs(e)) break;
    if (it == opt.max_iterations)
      throw IterationLimitError("plaplace: Newton iteration limit reached", norm(grad));
  }
  res.energy = e;
  res.residual = norm(grad);
}

void solve_accelerated(const Problem& pr, std::vector<double>& x, const PLaplaceOptions& opt, PLaplaceResult& res) {
  constexpr int kMaxIterations = 100000, kWindow = 50;
  std::vector<double> y = x, x_prev = x, grad, trial(x.size());
  double L = 1.0, t = 1.0;
  double e = pr.energy(x, nullptr);
  std::vector<double> history{e};
  for (int it = 1; it <= kMaxIterations; ++it) {
    const double ey = pr.energy(y, &grad);
    const double g2 = dot(grad, grad);
    double e_new;
    for (;;) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = y[i] - grad[i] / L;
      e_new = pr.energy(trial, nullptr);
      if (e_new <= ey - 0.5 * g2 / L || L > 1e30) break;
      L *= 2.0;
    }
    if (e_new > e) {  // restart momentum
      y = x;
      t = 1.0;
      continue;
    }
    x_prev.swap(x);
    x = trial;
    const double t_next = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + (t - 1) / t_next * (x[i] - x_prev[i]);
    t = t_next;
    L *= 0.9;
    e = e_new;
    history.push_back(e);
    res.iterations = it;
    if (history.size() > kWindow) {
      const double old = history[history.size() - 1 - kWindow];
      if (old - e < opt.rel_energy_tol * std::abs(e)) {
        pr.energy(x, &grad);
        res.energy = e;
        res.residual = norm(grad);
        return;
      }
    }
  }
  pr.energy(x, &grad);
  throw IterationLimitError("plaplace: accelerated descent iteration limit reached", norm(grad));
}

}  // namespace

double plaplace_energy(const ConvexBody& body, const SourceField& source, double p, const GridFunction& u,
                       std::vector<double>* gradient) {
  const Problem pr = make_problem(body, source, p, u.grid);
  const std::vector<double> x = gather(pr, &u);
  std::vector<double> g;
  const double e = pr.energy(x, gradient ? &g : nullptr);
  if (gradient) {
    gradient->assign(u.grid.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) (*gradient)[pr.mesh.node_of[i]] = g[i];
  }
  return e;
}

PLaplaceResult plaplace_solve(const DistanceField& field, const SourceField& source, double p, const Grid& grid,
                              const PLaplaceOptions& options) {
  if (!(p >= 1.5 && p <= 64)) throw InputError("plaplace: exponent must lie in [1.5, 64]");
  const Problem pr = make_problem(field.body(), source, p, grid);
  std::vector<double> x = gather(pr, options.initial);
  PLaplaceResult res;
  if (options.method == PLaplaceOptions::Method::Newton) {
    res.method = "newton";
    solve_newton(pr, x, options, res);
  } else {
    res.method = "accelerated";
    solve_accelerated(pr, x, options, res);
  }
  res.u = scatter(pr, grid, x);
  return res;
}

SweepReport plaplace_sweep(const DistanceField& field, const SourceField& source, const std::vector<double>& p_list,
                           double h, bool unique) {
  const Grid grid = Grid::with_spacing(field.boundary(), h, 1);
  const GridFunction d = GridFunction::sample(grid, [&](const Vec2& x) { return field.value(x); });
  SweepReport rep;
  rep.grid_h = h;
  rep.asserted = unique && p_list.size() >= 2;
  rep.rows.reserve(p_list.size());
  const GridFunction* warm = nullptr;
  for (double p : p_list) {
    PLaplaceOptions opt;
    opt.initial = warm;
    PLaplaceResult r = plaplace_solve(field, source, p, grid, opt);
    SweepRow row;
    row.p = p;
    row.energy = r.energy;
    row.iterations = r.iterations;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (!grid.active(k)) continue;
      const double e = std::abs(r.u.values[k] - d.values[k]);
      row.sup_error = std::max(row.sup_error, e);
      row.l1_error += e * h * h;
    }
    row.u = std::move(r.u);
    rep.rows.push_back(std::move(row));
    warm = &rep.rows.back().u;
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    rep.monotone = rep.monotone && rep.rows[i].sup_error <= rep.rows[i - 1].sup_error + rep.slack;
  return rep;
}

}  // namespace mkt
