#include "mkt/scenario.hpp"

#include "mkt/checks.hpp"
#include "mkt/distance_field.hpp"
#include "mkt/minimizer.hpp"
#include "mkt/transport_density.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

namespace mkt {

ScenarioError::ScenarioError(int code, std::string kind, const std::string& message, Json detail)
    : std::runtime_error(message), code_(code), kind_(std::move(kind)), detail_(std::move(detail)) {}

Json ScenarioError::to_json() const {
  Json j;
  j["error"] = kind_;
  j["code"] = code_;
  j["message"] = what();
  j["detail"] = detail_;
  return j;
}

const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks{"distance",   "sigma",           "tau",     "transport-density",
                                              "minimizer",  "uniqueness",      "existence-check", "plaplace",
                                              "verify-all"};
  return tasks;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

[[noreturn]] void config_error(const std::string& msg, Json detail = Json::object()) {
  throw ScenarioError(kExitConfig, "config_error", msg, std::move(detail));
}

const Json& require(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    config_error("missing required field '" + where + key + "'", {{"field", where + key}});
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) config_error("field '" + where + "' must be a number", {{"field", where}});
  return j.get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + key) : fallback;
}

Vec2 vec2(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) config_error("field '" + where + "' must be a pair of numbers", {{"field", where}});
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

Vec2 vec2_or(const Json& j, const std::string& key, const Vec2& fallback, const std::string& where) {
  return j.contains(key) ? vec2(j.at(key), where + key) : fallback;
}

std::string string_field(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_string()) config_error("field '" + where + key + "' must be a string", {{"field", where + key}});
  return v.get<std::string>();
}

int int_or(const Json& j, const std::string& key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) config_error("field '" + where + key + "' must be an integer", {{"field", where + key}});
  return v.get<int>();
}

Json vec_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

/// Non-finite values become strings so the summary stays valid JSON.
Json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

Json metric(double value, double tolerance) { return {{"value", num(value)}, {"tolerance", num(tolerance)}}; }

ConvexBody parse_body(const Json& j) {
  const std::string kind = string_field(j, "kind", "body.");
  ConvexBody body = [&] {
    if (kind == "euclidean") return ConvexBody::euclidean();
    if (kind == "ellipse") {
      const Json& a = require(j, "A", "body.");
      if (!a.is_array() || a.size() != 2) config_error("field 'body.A' must be a 2x2 array", {{"field", "body.A"}});
      const Vec2 r0 = vec2(a[0], "body.A[0]"), r1 = vec2(a[1], "body.A[1]");
      Mat2 A;
      A << r0.x(), r0.y(), r1.x(), r1.y();
      return ConvexBody::ellipse(A);
    }
    if (kind == "randers") return ConvexBody::randers(vec2(require(j, "b", "body."), "body.b"));
    if (kind == "square" || kind == "max_norm") return ConvexBody::max_norm();
    config_error("unknown body kind '" + kind + "'", {{"field", "body.kind"}, {"value", kind}});
  }();
  if (j.contains("scale")) body = body.scaled(number(j.at("scale"), "body.scale"));
  return body;
}

DomainBoundary parse_boundary(const Json& j) {
  const std::string kind = string_field(j, "kind", "boundary.");
  const int samples = int_or(j, "samples", 2048, "boundary.");
  const Vec2 c = vec2_or(j, "center", Vec2::Zero(), "boundary.");
  if (kind == "circle") return DomainBoundary::circle(number(require(j, "radius", "boundary."), "boundary.radius"), c, samples);
  if (kind == "ellipse")
    return DomainBoundary::ellipse(number(require(j, "a", "boundary."), "boundary.a"),
                                   number(require(j, "b", "boundary."), "boundary.b"), c, samples);
  if (kind == "polar")
    return DomainBoundary::polar_curve(number(require(j, "radius", "boundary."), "boundary.radius"),
                                       number_or(j, "amplitude", 0.0, "boundary."), int_or(j, "lobes", 3, "boundary."),
                                       samples);
  config_error("unknown boundary kind '" + kind + "'", {{"field", "boundary.kind"}, {"value", kind}});
}

Region parse_region(const Json& j, const DomainBoundary& boundary, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "domain") return Region::domain(boundary);
  if (!j.is_object() || j.size() != 1)
    config_error("field '" + where + "' must be an object with one primitive key", {{"field", where}});
  const std::string kind = j.begin().key();
  const Json& p = j.begin().value();
  const std::string w = where + "." + kind + ".";
  if (kind == "domain") return Region::domain(boundary);
  if (kind == "disk") return Region::disk(vec2(require(p, "c", w), w + "c"), number(require(p, "r", w), w + "r"));
  if (kind == "halfplane") return Region::half_plane(vec2(require(p, "n", w), w + "n"), number(require(p, "b", w), w + "b"));
  if (kind == "box") return Region::box(vec2(require(p, "lo", w), w + "lo"), vec2(require(p, "hi", w), w + "hi"));
  if (kind == "polygon") {
    const Json& pts = require(p, "pts", w);
    if (!pts.is_array() || pts.size() < 3) config_error("field '" + w + "pts' needs at least 3 points", {{"field", w + "pts"}});
    std::vector<Vec2> v;
    for (std::size_t i = 0; i < pts.size(); ++i) v.push_back(vec2(pts[i], w + "pts[" + std::to_string(i) + "]"));
    return Region::polygon(std::move(v));
  }
  if (kind == "sector")
    return Region::sector(vec2_or(p, "c", Vec2::Zero(), w), number(require(p, "theta1", w), w + "theta1"),
                          number(require(p, "theta2", w), w + "theta2"), number_or(p, "r1", 0.0, w),
                          number(require(p, "r2", w), w + "r2"));
  if (kind == "spiral")
    return Region::spiral(vec2_or(p, "c", Vec2::Zero(), w), number(require(p, "a", w), w + "a"),
                          number(require(p, "b", w), w + "b"), number(require(p, "r2", w), w + "r2"));
  config_error("unknown region primitive '" + kind + "'", {{"field", where}, {"value", kind}});
}

SourceField parse_source(const Json& j, const DomainBoundary& boundary) {
  const Json& terms = require(j, "terms", "source.");
  if (!terms.is_array()) config_error("field 'source.terms' must be an array", {{"field", "source.terms"}});
  std::vector<SourceField::Term> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string w = "source.terms[" + std::to_string(i) + "].";
    const double value = number(require(terms[i], "value", w), w + "value");
    if (!(value >= 0))
      throw ScenarioError(kExitValidation, "validation_error", "source values must be nonnegative",
                          {{"check", "source_nonnegative"}, {"field", w + "value"}, {"value", num(value)}});
    out.push_back({value, parse_region(require(terms[i], "region", w), boundary, w + "region")});
  }
  return SourceField::piecewise(std::move(out));
}

}  // namespace

Scenario parse_scenario(const Json& config) {
  if (!config.is_object()) config_error("scenario must be a JSON object");
  Scenario sc;
  sc.raw = config;
  sc.name = config.contains("name") && config["name"].is_string() ? config["name"].get<std::string>() : "scenario";
  try {
    sc.body = parse_body(require(config, "body", ""));
    try {
      sc.boundary = parse_boundary(require(config, "boundary", ""));
    } catch (const ConfigurationError& e) {
      throw ScenarioError(kExitValidation, "validation_error", e.what(), {{"check", "boundary"}});
    }
    sc.source = config.contains("source") ? parse_source(config["source"], *sc.boundary)
                                          : SourceField::constant(1.0, Region::domain(*sc.boundary));

    if (config.contains("lagrangian")) {
      const Json& l = config["lagrangian"];
      LagrangianSpec spec;
      spec.kind = string_field(l, "kind", "lagrangian.");
      if (spec.kind == "hinge") {
        const Json& lam = require(l, "lambda0", "lagrangian.");
        if (!(lam.is_string() && lam.get<std::string>() == "h3")) spec.lambda0 = number(lam, "lagrangian.lambda0");
        spec.factor = number_or(l, "factor", 1.0, "lagrangian.");
      } else if (spec.kind != "indicator") {
        config_error("unknown lagrangian kind '" + spec.kind + "'", {{"field", "lagrangian.kind"}, {"value", spec.kind}});
      }
      sc.lagrangian = spec;
    }

    if (config.contains("grid")) {
      const Json& g = config["grid"];
      if (g.contains("h")) sc.grid.h = number(g["h"], "grid.h");
      sc.grid.n = int_or(g, "n", sc.grid.n, "grid.");
      if ((sc.grid.h && !(*sc.grid.h > 0)) || sc.grid.n < 4) config_error("grid spacing must be positive", {{"field", "grid"}});
    }

    const Json& tasks = require(config, "tasks", "");
    if (!tasks.is_array() || tasks.empty()) config_error("field 'tasks' must be a nonempty array", {{"field", "tasks"}});
    for (const Json& t : tasks) {
      if (!t.is_string()) config_error("task names must be strings", {{"field", "tasks"}});
      sc.tasks.push_back(t.get<std::string>());
    }
    if (config.contains("output")) {
      if (!config["output"].is_string()) config_error("field 'output' must be a string", {{"field", "output"}});
      sc.output = config["output"].get<std::string>();
    }
    if (config.contains("seed")) {
      if (!config["seed"].is_number_integer() || (!config["seed"].is_number_unsigned() && config["seed"].get<std::int64_t>() < 0)) config_error("field 'seed' must be a nonnegative integer", {{"field", "seed"}});
      sc.seed = config["seed"].get<std::uint64_t>();
    }
    if (config.contains("p_list")) {
      sc.p_list.clear();
      for (const Json& p : config["p_list"]) {
        const double v = number(p, "p_list[]");
        if (!(v >= 2)) config_error("p_list entries must be >= 2", {{"field", "p_list"}});
        sc.p_list.push_back(v);
      }
    }
    sc.trials = int_or(config, "trials", sc.trials, "");
    sc.samples_per_check = int_or(config, "samples", sc.samples_per_check, "");
  } catch (const InputError& e) {
    config_error(e.what());
  } catch (const Json::exception& e) {
    config_error(e.what());
  }

  for (const std::string& t : sc.tasks)
    if (std::find(known_tasks().begin(), known_tasks().end(), t) == known_tasks().end())
      config_error("unknown task '" + t + "'", {{"field", "tasks"}, {"value", t}});

  const BodyValidationReport v = sc.body->validate_c2plus();
  if (!v.passed) {
    Json detail{{"check", "validate_c2plus"},
                {"body", sc.body->name()},
                {"min_curvature", num(v.min_curvature)},
                {"max_gradient_jump", num(v.max_gradient_jump)}};
    Json angles = Json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(v.offending_angles.size(), 16); ++i) angles.push_back(v.offending_angles[i]);
    detail["offending_angles"] = angles;
    throw ScenarioError(kExitValidation, "validation_error", "body fails validate_c2plus: " + v.message, detail);
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open scenario file '" + path.string() + "'", {{"path", path.string()}});
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    config_error(std::string("scenario is not valid JSON: ") + e.what(), {{"path", path.string()}});
  }
  return parse_scenario(j);
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError(kExitConfig, "io_error", "cannot write '" + path.string() + "'", {{"path", path.string()}});
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw ScenarioError(kExitConfig, "io_error", "write failed for '" + path.string() + "'", {{"path", path.string()}});
}

}  // namespace

void export_field(const std::filesystem::path& path, const GridFunction& u) {
  std::ofstream out = open_output(path);
  out << "x,y,value\n";
  const Grid& g = u.grid;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 x = g.node(k);
    out << format_number(x.x()) << ',' << format_number(x.y()) << ','
        << (g.active(k) ? format_number(u.values[k]) : std::string("nan")) << '\n';
  }
  finish_output(out, path);
}

void export_singular_set(const std::filesystem::path& path, const SingularSet& sigma) {
  std::ofstream out = open_output(path);
  out << "x,y,adjacency\n";
  for (std::size_t i = 0; i < sigma.points.size(); ++i) {
    out << format_number(sigma.points[i].x()) << ',' << format_number(sigma.points[i].y()) << ',';
    const auto& adj = sigma.adjacency[i];
    for (std::size_t k = 0; k < adj.size(); ++k) out << (k ? ";" : "") << adj[k];
    out << '\n';
  }
  finish_output(out, path);
}

void export_points(const std::filesystem::path& path, const std::vector<Vec2>& points, const std::vector<double>& values,
                   const std::string& column) {
  std::ofstream out = open_output(path);
  out << "x,y," << column << '\n';
  for (std::size_t i = 0; i < points.size(); ++i)
    out << format_number(points[i].x()) << ',' << format_number(points[i].y()) << ',' << format_number(values[i]) << '\n';
  finish_output(out, path);
}

namespace {

/// Shared, lazily computed state of one run.
class Context {
 public:
  Context(const Scenario& sc, const std::filesystem::path& out)
      : sc_(sc),
        out_(out),
        field_(*sc.body, *sc.boundary),
        grid_(sc.grid.h ? Grid::with_spacing(*sc.boundary, *sc.grid.h) : Grid::with_count(*sc.boundary, sc.grid.n)) {}

  const Scenario& scenario() const { return sc_; }
  const DistanceField& field() const { return field_; }
  const SourceField& source() const { return *sc_.source; }
  const Grid& grid() const { return grid_; }
  double h() const { return grid_.spacing(); }
  const GridFunction& distance_grid() {
    if (!d_) d_ = GridFunction::sample(grid_, [&](const Vec2& x) { return field_.value(x); });
    return *d_;
  }
  const SingularSet& sigma() {
    if (!sigma_) sigma_ = field_.singular_set(h());
    return *sigma_;
  }
  const UniquenessVerdict& verdict() {
    if (!verdict_) verdict_ = uniqueness_verdict(field_, source(), sigma(), h());
    return *verdict_;
  }
  const H3Report& h3() {
    if (!h3_) h3_ = check_h3(lagrangian(), source(), field_);
    return *h3_;
  }

  /// Hinge with the "h3" keyword resolves to factor * c(H0, r) ||f||.
  Lagrangian lagrangian() {
    if (!sc_.lagrangian || sc_.lagrangian->kind == "indicator") return Lagrangian::indicator();
    if (sc_.lagrangian->lambda0) return Lagrangian::hinge(*sc_.lagrangian->lambda0);
    if (!threshold_) {
      const H3Report probe = check_h3(Lagrangian::hinge(1.0), source(), field_);
      threshold_ = sc_.lagrangian->factor * probe.lhs;
    }
    return Lagrangian::hinge(*threshold_);
  }

  std::filesystem::path file(const std::string& name) {
    const auto p = out_ / name;
    files.push_back(p);
    return p;
  }

  /// Records a pass/fail check; failures of asserting tasks make the run exit with 4.
  Json check(const std::string& id, double value, double tolerance, bool passed, bool asserting = true) {
    if (!passed && asserting) failed.push_back(id);
    return {{"value", num(value)}, {"tolerance", num(tolerance)}, {"passed", passed}};
  }

  std::vector<std::string> failed;
  std::vector<std::filesystem::path> files;

 private:
  const Scenario& sc_;
  std::filesystem::path out_;
  DistanceField field_;
  Grid grid_;
  std::optional<GridFunction> d_;
  std::optional<SingularSet> sigma_;
  std::optional<UniquenessVerdict> verdict_;
  std::optional<H3Report> h3_;
  std::optional<double> threshold_;
};

Json suite_json(const SuiteResult& s, Context& ctx) {
  Json checks = Json::array();
  for (const CheckResult& c : s.checks) {
    Json j{{"name", c.name}};
    j.update(ctx.check(s.name + "." + c.name, c.value, c.tolerance, c.passed()));
    j["samples"] = c.samples;
    j["failures"] = c.failures;
    checks.push_back(j);
  }
  return {{"name", s.name}, {"passed", s.passed()}, {"checks", checks}};
}

Json task_distance(Context& ctx) {
  const GridFunction& d = ctx.distance_grid();
  export_field(ctx.file("distance.csv"), d);
  double max_d = 0;
  for (std::size_t k = 0; k < d.values.size(); ++k)
    if (d.grid.active(k)) max_d = std::max(max_d, d.values[k]);
  const DistanceField& f = ctx.field();
  return {{"file", "distance.csv"},
          {"inradius", metric(f.inradius(), f.projection_tolerance())},
          {"incenter", vec_json(f.incenter())},
          {"grid_max", metric(max_d, f.projection_tolerance())},
          {"projection_tolerance", num(f.projection_tolerance())}};
}

Json task_sigma(Context& ctx) {
  const SingularSet& s = ctx.sigma();
  export_singular_set(ctx.file("sigma.csv"), s);
  double nearest = std::numeric_limits<double>::infinity();
  for (const Vec2& p : s.points) nearest = std::min(nearest, ctx.field().boundary().polygon_distance(p));
  const double tol = ctx.h();
  return {{"file", "sigma.csv"},
          {"points", s.points.size()},
          {"resolution", num(s.resolution)},
          {"interior", ctx.check("sigma.interior", s.points.empty() ? 0.0 : nearest, 0.0, s.points.empty() || nearest > 0)},
          {"boundary_clearance", metric(s.points.empty() ? 0.0 : nearest, tol)}};
}

Json task_tau(Context& ctx) {
  const DistanceField& f = ctx.field();
  const auto& tau = f.tau_table();
  export_points(ctx.file("tau.csv"), f.boundary().sample_points(), tau);
  const double tol = 1e-8 * f.boundary().diameter();
  const auto [lo, hi] = std::minmax_element(tau.begin(), tau.end());
  return {{"file", "tau.csv"}, {"samples", tau.size()}, {"min", metric(*lo, tol)}, {"max", metric(*hi, tol)}};
}

Json task_density(Context& ctx) {
  const DensityOptions opt;
  const GridFunction v = transport_density_grid(ctx.field(), ctx.source(), ctx.grid(), opt);
  export_field(ctx.file("transport_density.csv"), v);
  const DensityBoundReport b = density_bound_check(ctx.field(), ctx.source(), ctx.h());
  return {{"file", "transport_density.csv"},
          {"quadrature_rel_tol", num(opt.rel_tol)},
          {"sup_bound", ctx.check("transport-density.sup_bound", b.max_density, b.bound * (1 + b.rel_slack), b.passed)},
          {"argmax", vec_json(b.argmax)},
          {"sup_f", metric(b.sup_f, 0.0)},
          {"H0", metric(b.H0, 1e-8)},
          {"inradius", metric(b.inradius, ctx.field().projection_tolerance())},
          {"interior_max", metric(b.interior_max, opt.rel_tol)},
          {"interior_margin", ctx.check("transport-density.interior_margin", b.interior_margin, 0.0, b.interior_strict, false)}};
}

Json task_minimizer(Context& ctx) {
  const MaxConvolution uf = minimal_minimizer(ctx.field(), ctx.source(), ctx.h());
  const GridFunction u = uf.on_grid(ctx.grid());
  export_field(ctx.file("minimizer.csv"), u);
  const GridFunction& d = ctx.distance_grid();
  double gap = 0, above = 0;
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    if (!u.grid.active(k)) continue;
    gap = std::max(gap, d.values[k] - u.values[k]);
    above = std::max(above, u.values[k] - d.values[k]);
  }
  const double tol = 1e-9 * ctx.field().boundary().diameter();
  return {{"file", "minimizer.csv"},
          {"candidates", uf.candidate_count()},
          {"sample_spacing", num(0.25 * ctx.h())},
          {"gap", metric(gap, uf.lipschitz() * 0.25 * ctx.h())},
          {"below_distance", ctx.check("minimizer.below_distance", above, tol, above <= tol)}};
}

Json task_uniqueness(Context& ctx) {
  const UniquenessVerdict& v = ctx.verdict();
  Json j{{"verdict", v.unique ? "UNIQUE" : "NON-UNIQUE"},
         {"sigma_points", v.sigma_points},
         {"uncovered", v.uncovered},
         {"cover_tolerance", num(v.tolerance)}};
  j["witness"] = v.witness ? vec_json(*v.witness) : Json(nullptr);
  j["witness_distance"] = metric(v.witness_distance, v.tolerance);
  j["gap"] = metric(v.gap.gap, 3.0 * ctx.h());
  j["gap_argmax"] = vec_json(v.gap.argmax);

  const Lagrangian h = ctx.lagrangian();
  const MaxConvolution uf = minimal_minimizer(ctx.field(), ctx.source(), ctx.h());
  const FunctionalReport Jd = functional_J(ctx.distance_grid(), h, ctx.source(), ctx.field());
  const FunctionalReport Ju = functional_J(uf.on_grid(ctx.grid()), h, ctx.source(), ctx.field());
  const double tol = 1e-3 * std::abs(Jd.value);
  j["lagrangian"] = h.name();
  j["J_d"] = metric(Jd.value, Jd.tol_K);
  j["J_uf"] = metric(Ju.value, Ju.tol_K);
  j["J_agreement"] = ctx.check("uniqueness.J_agreement", std::abs(Ju.value - Jd.value), tol,
                               std::abs(Ju.value - Jd.value) <= tol, false);
  return j;
}

Json task_existence(Context& ctx) {
  if (!ctx.scenario().lagrangian) config_error("task 'existence-check' needs a lagrangian", {{"field", "lagrangian"}});
  const Lagrangian h = ctx.lagrangian();
  const H3Report& r = ctx.h3();
  Json j{{"lagrangian", h.name()},
         {"Lambda", metric(r.Lambda, 0.0)},
         {"H0", metric(r.H0, 1e-8)},
         {"inradius", metric(r.inradius, ctx.field().projection_tolerance())},
         {"c", metric(r.c, 1e-12)},
         {"h3", {{"value", num(r.lhs)}, {"tolerance", num(r.Lambda * (1 + r.rel_tol))}, {"passed", r.passed}}},
         {"convex_sufficient", r.convex_sufficient}};
  if (!r.passed) {
    j["applicable"] = false;
    return j;
  }
  j["applicable"] = true;
  const MinimalityReport m = minimality_test(ctx.field(), h, ctx.source(), ctx.scenario().trials, ctx.h(), ctx.scenario().seed);
  j["trials"] = m.trials.size();
  j["seed"] = m.seed;
  j["J_d"] = metric(m.J_d, m.tol_J);
  j["J_uf"] = metric(m.J_uf, m.tol_J);
  j["uf_matches"] = ctx.check("existence-check.uf_matches", std::abs(m.J_uf - m.J_d), m.tol_J, m.uf_matches);
  j["violations"] = ctx.check("existence-check.violations", static_cast<double>(m.violations), 0.0, m.violations == 0);
  double worst = -std::numeric_limits<double>::infinity();
  for (const Perturbation& p : m.trials) worst = std::max(worst, m.J_d - p.J);
  j["worst_margin"] = metric(worst, m.tol_J);
  return j;
}

Json task_plaplace(Context& ctx) {
  const bool unique = ctx.verdict().unique;
  const SweepReport rep = plaplace_sweep(ctx.field(), ctx.source(), ctx.scenario().p_list, ctx.h(), unique);
  Json rows = Json::array();
  for (const SweepRow& row : rep.rows) {
    const std::string name = "plaplace_p" + format_number(row.p) + ".csv";
    export_field(ctx.file(name), row.u);
    rows.push_back({{"p", row.p},
                    {"file", name},
                    {"sup_error", metric(row.sup_error, rep.slack)},
                    {"l1_error", metric(row.l1_error, rep.slack)},
                    {"energy", metric(row.energy, 1e-10)},
                    {"iterations", row.iterations}});
  }
  Json j{{"unique", unique}, {"rows", rows}};
  double worst = 0;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) worst = std::max(worst, rep.rows[i].sup_error - rep.rows[i - 1].sup_error);
  j["monotone"] = ctx.check("plaplace.monotone", worst, rep.slack, rep.monotone, rep.asserted);
  j["asserted"] = rep.asserted;
  return j;
}

Json task_verify_all(Context& ctx) {
  const Scenario& sc = ctx.scenario();
  std::vector<SuiteResult> suites;
  suites.push_back(gauge_suite(*sc.body, sc.samples_per_check, sc.seed));
  suites.push_back(curvature_suite(*sc.boundary, *sc.body));
  suites.push_back(growth_factor_suite(ctx.field().inradius(), 1000, sc.seed + 1));
  suites.push_back(distance_suite(ctx.field(), 1000, sc.seed + 2));
  suites.push_back(density_suite(ctx.field(), ctx.source(), ctx.h()));
  suites.push_back(minimizer_suite(ctx.field(), ctx.source(), ctx.h()));
  Json list = Json::array();
  bool all = true;
  for (const SuiteResult& s : suites) {
    list.push_back(suite_json(s, ctx));
    all = all && s.passed();
  }
  if (sc.lagrangian && sc.lagrangian->kind == "hinge") {
    Json e = task_existence(ctx);
    const bool ok = !e["applicable"].get<bool>() ||
                    (e["violations"]["passed"].get<bool>() && e["uf_matches"]["passed"].get<bool>());
    list.push_back({{"name", "minimality"}, {"passed", ok}, {"report", e}});
    all = all && ok;
  }
  return {{"passed", all}, {"suites", list}};
}

}  // namespace

RunResult run_scenario(Scenario sc, const RunOverrides& ov) {
  if (ov.output) sc.output = *ov.output;
  if (ov.grid_h) {
    if (!(*ov.grid_h > 0)) config_error("--grid-h must be positive", {{"field", "grid.h"}});
    sc.grid.h = *ov.grid_h;
  }
  if (ov.seed) sc.seed = *ov.seed;
  if (!ov.tasks.empty()) {
    for (const std::string& t : ov.tasks)
      if (std::find(known_tasks().begin(), known_tasks().end(), t) == known_tasks().end())
        config_error("unknown task '" + t + "'", {{"field", "tasks"}, {"value", t}});
    sc.tasks = ov.tasks;
  }
  std::error_code ec;
  std::filesystem::create_directories(sc.output, ec);
  if (ec) throw ScenarioError(kExitConfig, "io_error", "cannot create '" + sc.output.string() + "': " + ec.message(),
                              {{"path", sc.output.string()}});

  Context ctx(sc, sc.output);

  Json summary;
  summary["scenario"] = sc.name;
  summary["seed"] = sc.seed;
  summary["body"] = {{"name", sc.body->name()},
                     {"c1", num(sc.body->enclosing_constants().c1)},
                     {"c2", num(sc.body->enclosing_constants().c2)}};
  summary["boundary"] = {{"samples", sc.boundary->sample_count()},
                         {"length", num(sc.boundary->length())},
                         {"diameter", num(sc.boundary->diameter())}};
  const Grid& g = ctx.grid();
  summary["grid"] = {{"nx", g.nx()}, {"ny", g.ny()}, {"h", num(g.spacing())}, {"origin", vec_json(g.origin())},
                     {"active_nodes", g.active_count()}};
  summary["tasks"] = Json::object();

  using Task = Json (*)(Context&);
  static const std::map<std::string, Task> table{
      {"distance", task_distance},     {"sigma", task_sigma},         {"tau", task_tau},
      {"transport-density", task_density}, {"minimizer", task_minimizer}, {"uniqueness", task_uniqueness},
      {"existence-check", task_existence}, {"plaplace", task_plaplace},   {"verify-all", task_verify_all}};
  for (const std::string& t : sc.tasks) summary["tasks"][t] = table.at(t)(ctx);

  summary["failed_checks"] = ctx.failed;
  summary["status"] = ctx.failed.empty() ? "ok" : "assertion_failure";

  const auto path = ctx.file("summary.json");
  std::ofstream out = open_output(path);
  out << summary.dump(2) << '\n';
  finish_output(out, path);

  RunResult r;
  r.code = ctx.failed.empty() ? kExitOk : kExitAssertion;
  r.summary = std::move(summary);
  r.failed_checks = ctx.failed;
  r.files = ctx.files;
  return r;
}

int run_scenario_file(const std::filesystem::path& path, const RunOverrides& overrides, std::ostream& err) {
  try {
    const RunResult r = run_scenario(load_scenario(path), overrides);
    if (r.code == kExitAssertion) {
      Json j{{"error", "assertion_failure"}, {"code", r.code}, {"message", "verification checks failed"},
             {"detail", {{"failed_checks", r.failed_checks}}}};
      err << j.dump() << '\n';
    }
    return r.code;
  } catch (const ScenarioError& e) {
    err << e.to_json().dump() << '\n';
    return e.code();
  } catch (const ConfigurationError& e) {
    err << ScenarioError(kExitConfig, "config_error", e.what()).to_json().dump() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    err << ScenarioError(kExitConfig, "config_error", e.what()).to_json().dump() << '\n';
    return kExitConfig;
  }
}

}  // namespace mkt
