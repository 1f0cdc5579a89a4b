#include "mkt/minimizer.hpp"
#include "mkt/scenario.hpp"
#include "mkt/transport_density.hpp"
#include "mkt/variational.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace mkt;

namespace {

// Scenario configs cross the boundary as JSON text; the Python wrapper handles dicts.
py::tuple run_json(const std::string& text, std::optional<std::string> output, std::optional<std::uint64_t> seed,
                   std::vector<std::string> tasks) {
  RunOverrides ov;
  if (output) ov.output = *output;
  ov.seed = seed;
  ov.tasks = std::move(tasks);
  try {
    const Scenario sc = parse_scenario(Json::parse(text));
    RunResult r;
    {
      py::gil_scoped_release release;
      r = run_scenario(sc, ov);
    }
    return py::make_tuple(r.code, r.summary.dump());
  } catch (const Json::parse_error& e) {
    return py::make_tuple(static_cast<int>(kExitConfig),
                          ScenarioError(kExitConfig, "config_error", e.what(), Json::object()).to_json().dump());
  } catch (const ScenarioError& e) {
    return py::make_tuple(e.code(), e.to_json().dump());
  } catch (const ConfigurationError& e) {
    return py::make_tuple(static_cast<int>(kExitConfig), ScenarioError(kExitConfig, "config_error", e.what()).to_json().dump());
  } catch (const InputError& e) {
    return py::make_tuple(static_cast<int>(kExitConfig), ScenarioError(kExitConfig, "config_error", e.what()).to_json().dump());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Anisotropic distance, transport density and minimizers on planar domains";

  py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<ConvexBody>(m, "ConvexBody")
      .def_static("euclidean", &ConvexBody::euclidean)
      .def_static("ellipse", &ConvexBody::ellipse, py::arg("A"))
      .def_static("randers", &ConvexBody::randers, py::arg("b"))
      .def_static("max_norm", &ConvexBody::max_norm)
      .def_property_readonly("name", &ConvexBody::name)
      .def("gauge", &ConvexBody::gauge)
      .def("polar_gauge", &ConvexBody::polar_gauge)
      .def("validate", [](const ConvexBody& b) {
        const BodyValidationReport r = b.validate_c2plus();
        py::dict d;
        d["passed"] = r.passed, d["min_curvature"] = r.min_curvature, d["max_gradient_jump"] = r.max_gradient_jump;
        d["message"] = r.message;
        return d;
      });

  py::class_<DomainBoundary>(m, "DomainBoundary")
      .def_static("circle", [](double r, int n) { return DomainBoundary::circle(r, Vec2::Zero(), n); }, py::arg("radius"),
                  py::arg("samples") = DomainBoundary::kDefaultSamples)
      .def_static("ellipse", [](double a, double b, int n) { return DomainBoundary::ellipse(a, b, Vec2::Zero(), n); },
                  py::arg("a"), py::arg("b"), py::arg("samples") = DomainBoundary::kDefaultSamples)
      .def("contains", &DomainBoundary::contains);

  py::class_<Region>(m, "Region")
      .def_static("disk", &Region::disk, py::arg("center"), py::arg("radius"))
      .def_static("half_plane", &Region::half_plane, py::arg("n"), py::arg("b"))
      .def_static("box", &Region::box, py::arg("lo"), py::arg("hi"))
      .def_static("sector", &Region::sector, py::arg("center"), py::arg("theta1"), py::arg("theta2"), py::arg("r1"),
                  py::arg("r2"))
      .def_static("domain", &Region::domain)
      .def("contains", &Region::contains);

  py::class_<SourceField>(m, "SourceField")
      .def_static("zero", &SourceField::zero)
      .def_static("constant", &SourceField::constant, py::arg("value"), py::arg("region"))
      .def("__call__", &SourceField::evaluate)
      .def("plus", &SourceField::plus);

  py::class_<DistanceField>(m, "DistanceField")
      .def(py::init([](const ConvexBody& k, const DomainBoundary& b) { return DistanceField(k, b); }))
      .def("__call__", &DistanceField::value)
      .def("value", &DistanceField::value)
      .def("gradient", &DistanceField::gradient_d)
      .def("is_singular", [](const DistanceField& f, const Vec2& x) { return f.distance(x).singular; })
      .def("cut_time", [](const DistanceField& f, const Vec2& x) { return f.cut_time_interior(x).tau; })
      .def("inradius", &DistanceField::inradius)
      .def("singular_set", [](const DistanceField& f, double h) { return f.singular_set(h).points; }, py::arg("h"));

  m.def("growth_factor", [](double t, double r) { return growth_factor(t, r); }, py::arg("t"), py::arg("r"));
  m.def("transport_density", [](const DistanceField& f, const SourceField& s, const Vec2& x) {
    return transport_density(f, s, x).value;
  });
  m.def("minimal_minimizer", [](const DistanceField& f, const SourceField& s, const Vec2& x, double h) {
    return minimal_minimizer(f, s, h).value(x);
  }, py::arg("field"), py::arg("source"), py::arg("x"), py::arg("h") = 1.0 / 64);
  m.def("is_unique", [](const DistanceField& f, const SourceField& s, double h) {
    return uniqueness_verdict(f, s, f.singular_set(h), h).unique;
  }, py::arg("field"), py::arg("source"), py::arg("h") = 1.0 / 64);
  m.def("h3_threshold", [](const DistanceField& f, const SourceField& s) {
    return check_h3(Lagrangian::hinge(1.0), s, f).lhs;
  });

  m.def("_run_json", &run_json, py::arg("config"), py::arg("output") = std::nullopt, py::arg("seed") = std::nullopt,
        py::arg("tasks") = std::vector<std::string>{});
}
