// Acceptance run: one PASS/FAIL line per criterion. `acceptance [N ...]` restricts the run.
#include "mkt/checks.hpp"
#include "mkt/minimizer.hpp"
#include "mkt/transport_density.hpp"
#include "mkt/variational.hpp"

#include "../unit/oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace mkt;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Mat2 ellipse_matrix() {
  Mat2 A;
  A << 1.0, 0.2, 0.2, 0.5;
  return A;
}

const DistanceField& unit_disk() {
  static const DistanceField f(ConvexBody::euclidean(), DomainBoundary::circle(1.0));
  return f;
}

const DistanceField& ellipse_gauge_disk() {
  static const DistanceField f(ConvexBody::ellipse(ellipse_matrix()), DomainBoundary::circle(1.0));
  return f;
}

SourceField ones(const DistanceField& f) { return SourceField::constant(1.0, Region::domain(f.boundary())); }

void disk_density(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const DistanceField& f = unit_disk();
  const Grid g = Grid::with_count(f.boundary(), 128);
  const GridFunction v = transport_density_grid(f, ones(f), g);
  double err = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.active(k)) err = std::max(err, std::abs(v.values[k] - g.node(k).norm() / 2));
  const double t = seconds_since(t0);
  out.require(err <= 1e-4, "max |v - |x|/2| = " + num(err) + " <= 1e-4");
  out.require(t <= 10.0, "runtime " + num(t) + " s <= 10 s");
}

void weak_identity(Outcome& out) {
  for (const auto& [name, f] : {std::pair{"disk", &unit_disk()}, std::pair{"ellipse-K", &ellipse_gauge_disk()}}) {
    const auto bumps = standard_bumps(*f);
    const WeakIdentityReport r = verify_weak_identity(*f, ones(*f), bumps, 1.0 / 128);
    out.require(bumps.size() == 18 && r.max_residual <= 1e-3,
                std::string(name) + ": " + std::to_string(bumps.size()) + " bumps, max residual " + num(r.max_residual) +
                    " <= 1e-3");
  }
}

void sup_bound(Outcome& out) {
  for (const auto& [name, f] : {std::pair{"disk", &unit_disk()}, std::pair{"ellipse-K", &ellipse_gauge_disk()}}) {
    const DensityBoundReport r = density_bound_check(*f, ones(*f), 1.0 / 128);
    const bool slack = r.max_density <= r.bound * (1 + 1e-6);
    out.require(slack && r.interior_strict && r.interior_margin > 0,
                std::string(name) + ": max v " + num(r.max_density) + " <= bound " + num(r.bound) +
                    ", interior margin " + num(r.interior_margin) + " > 0");
  }
}

void spiral_lambda(Outcome& out) {
  const double R = 8.0;
  const DistanceField f(ConvexBody::euclidean(), DomainBoundary::circle(R, Vec2::Zero(), 8192));
  const RaySystem rays(f, {Region::spiral(Vec2::Zero(), 1.0, 1.0, R)});
  std::mt19937_64 rng(2024);
  double err = 0;
  for (int k = 0; k < 1000; ++k) {
    // Stay off the seam theta = 0 and the two ends of each ray segment.
    const double theta = 0.05 + (kTwoPi - 0.1) * uniform01(rng);
    const double r = 1 + theta + 0.05 + (R - 1 - theta - 0.1) * uniform01(rng);
    const double lam = rays.lambda_star(r * unit_direction(theta), 1e-9);
    err = std::max(err, std::abs(lam - (R - theta - 1)));
  }
  out.require(err <= 2e-2, "1000 ray points, max |lambda* - (R - theta - 1)| = " + num(err) + " <= 2e-2");
}

void uniqueness(Outcome& out) {
  const DistanceField& f = unit_disk();
  const double h = 1.0 / 64;
  const SingularSet sigma = f.singular_set(h);

  const UniquenessVerdict a = uniqueness_verdict(f, ones(f), sigma, h);
  out.require(a.unique && a.gap.gap <= 3 * h, std::string("f = 1: ") + (a.unique ? "UNIQUE" : "NON-UNIQUE") +
                                                  ", max |u_f - d| = " + num(a.gap.gap) + " <= 3h");

  const SourceField ring = SourceField::constant(1.0, Region::sector(Vec2::Zero(), 0.0, kTwoPi, 0.5, 1.0));
  const UniquenessVerdict b = uniqueness_verdict(f, ring, sigma, h);
  const double d0 = f.value(Vec2::Zero());
  const double wdist = b.witness ? b.witness->norm() : 1e300;
  out.require(!b.unique && wdist <= 2 * h, std::string("f on |x| >= R/2: ") + (b.unique ? "UNIQUE" : "NON-UNIQUE") +
                                                ", witness at |z| = " + num(wdist));
  out.require(b.gap.gap >= 0.9 * d0, "gap " + num(b.gap.gap) + " >= 0.9 d(0) = " + num(0.9 * d0));
  const MinimalityReport m = minimality_test(f, Lagrangian::indicator(), ring, 1, h, 1);
  const double dJ = std::abs(m.J_uf - m.J_d);
  out.require(dJ <= 1e-3 * std::abs(m.J_d), "|J(u_f) - J(d)| = " + num(dJ) + " <= " + num(1e-3 * std::abs(m.J_d)));
}

void minimality(Outcome& out) {
  for (const auto& [name, f] : {std::pair{"disk", &unit_disk()}, std::pair{"ellipse-K", &ellipse_gauge_disk()}}) {
    const SourceField one = ones(*f);
    const double threshold = check_h3(Lagrangian::hinge(1.0), one, *f).lhs;
    const MinimalityReport m = minimality_test(*f, Lagrangian::hinge(threshold), one, 100, 1.0 / 32, 7);
    std::size_t violations = 0, bumps = 0;
    for (const Perturbation& p : m.trials) {
      violations += m.J_d > p.J + 1e-3 * std::abs(m.J_d);
      bumps += p.type == "bump";
    }
    out.require(bumps >= 100 && violations == 0, std::string(name) + ": lambda0 = " + num(threshold) + ", " +
                                                     std::to_string(m.trials.size()) + " perturbations, " +
                                                     std::to_string(violations) + " violations");
  }
}

void plaplace(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const DistanceField& f = unit_disk();
  const std::vector<double> ps{2, 4, 8, 16, 32};
  const SweepReport s = plaplace_sweep(f, ones(f), ps, 1.0 / 128, true);
  const double t = seconds_since(t0);

  std::ostringstream l2s, sups;
  double worst = 0;
  bool decreasing = true;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const SweepRow& row = s.rows[i];
    const Grid& g = row.u.grid;
    double num2 = 0, den2 = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!g.active(k)) continue;
      const double ref = oracle::plaplace_radial(row.p, 1.0, g.node(k).norm());
      num2 += std::pow(row.u.values[k] - ref, 2), den2 += ref * ref;
    }
    const double rel = std::sqrt(num2 / den2);
    worst = std::max(worst, rel);
    l2s << (i ? "," : "") << num(rel);
    sups << (i ? "," : "") << num(row.sup_error);
    if (i > 0) decreasing = decreasing && row.sup_error < s.rows[i - 1].sup_error;
  }
  out.require(s.rows.size() == ps.size() && worst <= 2e-2, "rel L2 [" + l2s.str() + "] <= 2e-2");
  out.require(decreasing, "sup |u_p - d| [" + sups.str() + "] strictly decreasing");
  const double last = s.rows.empty() ? 1e300 : s.rows.back().sup_error;
  out.require(last <= 0.05, "final sup error " + num(last) + " <= 0.05");
  out.require(t <= 60.0, "runtime " + num(t) + " s <= 60 s");
}

void gauges(Outcome& out) {
  for (const ConvexBody& body : {ConvexBody::euclidean(), ConvexBody::ellipse(ellipse_matrix()),
                                 ConvexBody::randers(Vec2(0.3, -0.2))}) {
    const SuiteResult r = gauge_suite(body, 10000, 8);
    std::size_t failures = 0, samples = r.checks.empty() ? 0 : r.checks.front().samples;
    for (const CheckResult& c : r.checks) failures += c.failures, samples = std::min(samples, c.samples);
    out.require(r.passed() && samples >= 10000, r.name + ": " + std::to_string(r.checks.size()) + " properties x " +
                                                    std::to_string(samples) + " samples, " + std::to_string(failures) +
                                                    " failures");
  }
}

void curvature(Outcome& out) {
  const double R = 2.0;
  const DomainBoundary disk = DomainBoundary::circle(R);
  double err = 0;
  for (int i = 0; i < disk.sample_count(); i += 7)
    err = std::max(err, std::abs(anisotropic_curvature(disk, ConvexBody::euclidean(), disk.sample_arclength(i)) - 1 / R));
  out.require(err <= 1e-8, "disk max |k - 1/R| = " + num(err) + " <= 1e-8");

  const SuiteResult s = curvature_suite(DomainBoundary::circle(1.0), ConvexBody::ellipse(ellipse_matrix()));
  for (const CheckResult& c : s.checks)
    if (c.name == "tangentiality" || c.name == "ray_jacobian")
      out.require(c.passed() && c.value <= c.tolerance, "ellipse-K " + c.name + " " + num(c.value) + " <= " + num(c.tolerance));
}

void growth(Outcome& out) {
  for (double r : {0.5, 1.0, 3.0}) {
    const SuiteResult s = growth_factor_suite(r, 1000, 10);
    for (const CheckResult& c : s.checks)
      out.require(c.passed(), "r = " + num(r) + " " + c.name + " worst " + num(c.value) + " (tol " + num(c.tolerance) + ")");
  }
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "disk transport density", disk_density},
      {2, "weak identity", weak_identity},
      {3, "density sup bound", sup_bound},
      {4, "spiral lambda*", spiral_lambda},
      {5, "uniqueness dichotomy", uniqueness},
      {6, "minimality under perturbations", minimality},
      {7, "p-Laplace sweep", plaplace},
      {8, "gauge properties", gauges},
      {9, "curvature", curvature},
      {10, "growth factor", growth},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    failed += !out.passed;
    std::printf("%s  %2d  %-32s %s (%.1f s)\n", out.passed ? "PASS" : "FAIL", c.id, c.title, out.detail.str().c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
