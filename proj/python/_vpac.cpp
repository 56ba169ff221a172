// Python bindings. Fields cross the boundary as float64 numpy arrays of shape
// (n,) * dim in row-major order; configurations as plain dicts.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "vpac/config.hpp"
#include "vpac/diagnostics.hpp"
#include "vpac/errors.hpp"
#include "vpac/field.hpp"
#include "vpac/initial.hpp"
#include "vpac/io.hpp"
#include "vpac/model.hpp"
#include "vpac/scenario.hpp"
#include "vpac/stepper.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace vpac;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ScalarField to_field(const Array& a) {
  const int dim = static_cast<int>(a.ndim());
  if (dim < 1 || dim > 3) throw py::value_error("field must have 1, 2 or 3 axes");
  const auto n = a.shape(0);
  for (int k = 1; k < dim; ++k) {
    if (a.shape(k) != n) throw py::value_error("field must have equal extent on every axis");
  }
  const Grid grid(dim, static_cast<int>(n));
  return ScalarField(grid, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const ScalarField& f) {
  std::vector<py::ssize_t> shape(f.grid().dim(), f.grid().n());
  Array out(shape);
  std::copy(f.data(), f.data() + f.size(), out.mutable_data());
  return out;
}

json to_json(const py::object& obj) {
  return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::object from_json(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

ModelParams params(double eps, double m0, const std::string& kind, double alpha) {
  return ModelParams(eps, alpha, parse_model_kind(kind), m0);
}

py::dict record_dict(const DiagnosticsRecord& r) {
  py::dict d;
  const auto& names = DiagnosticsRecord::column_names();
  const auto values = r.as_array();
  for (std::size_t i = 0; i < names.size(); ++i) d[py::str(std::string(names[i]))] = values[i];
  return d;
}

// Columns of a record series as numpy arrays.
py::dict record_columns(const std::vector<DiagnosticsRecord>& recs) {
  py::dict d;
  const auto& names = DiagnosticsRecord::column_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::vector<double> col(recs.size());
    for (std::size_t k = 0; k < recs.size(); ++k) col[k] = recs[k].as_array()[c];
    Array a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(col.size())});
    std::copy(col.begin(), col.end(), a.mutable_data());
    d[py::str(std::string(names[c]))] = a;
  }
  return d;
}

py::dict artifacts_dict(const RunArtifacts& art) {
  py::dict d;
  d["records"] = record_columns(art.records());
  d["final_phi"] = to_array(art.result.final_state.phi);
  d["steps"] = art.result.steps;
  d["m0"] = art.m0;
  d["surface_energy0"] = art.surface_energy0;
  d["dt"] = art.config.time_step();
  py::list probes;
  for (const auto& p : art.probes) probes.append(py::make_tuple(p.t, p.probe, p.index, p.value));
  d["probes"] = probes;
  d["invariant_failures"] = check_invariants(art);
  d["written"] = art.written;
  return d;
}

}  // namespace

PYBIND11_MODULE(_vpac, m) {
  m.doc() = "Volume-preserving Allen-Cahn solver";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<BlowupError> blowup_error(m, "BlowupError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const BlowupError& e) {
      blowup_error(e.what());
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  m.def("sigma", &sigma);
  m.def(
      "stable_dt", [](int dim, int n, double eps, double safety) { return stable_dt(Grid(dim, n), eps, safety); },
      py::arg("dim"), py::arg("n"), py::arg("eps"), py::arg("safety") = kDefaultSafety);

  m.def("laplacian", [](const Array& phi) { return to_array(laplacian(to_field(phi))); }, py::arg("phi"));
  m.def("integrate", [](const Array& phi) { return integrate(to_field(phi)); }, py::arg("phi"));
  m.def("k_mass", [](const Array& phi) { return k_mass(to_field(phi)); }, py::arg("phi"));

  m.def(
      "rhs",
      [](const Array& phi, double eps, double m0, const std::string& kind, double alpha) {
        const RhsResult r = rhs(to_field(phi), params(eps, m0, kind, alpha));
        return py::make_tuple(to_array(r.dphi), r.multiplier.lambda);
      },
      py::arg("phi"), py::arg("eps"), py::arg("m0"), py::arg("kind") = "takasao",
      py::arg("alpha") = ModelParams::kDefaultAlpha, "Returns (dphi/dt, lambda).");

  m.def(
      "energies",
      [](const Array& phi, double eps, double m0, const std::string& kind, double alpha) {
        const Energies e = energies(to_field(phi), params(eps, m0, kind, alpha));
        py::dict d;
        d["E_S"] = e.surface;
        d["E_P"] = e.penalty;
        d["E"] = e.total();
        return d;
      },
      py::arg("phi"), py::arg("eps"), py::arg("m0"), py::arg("kind") = "takasao",
      py::arg("alpha") = ModelParams::kDefaultAlpha);

  m.def(
      "discrepancy",
      [](const Array& phi, double eps) {
        const Discrepancy d = discrepancy(to_field(phi), eps);
        py::dict out;
        out["xi"] = to_array(d.xi);
        out["sup_xi"] = d.sup_xi;
        out["xi_pos_l1"] = d.xi_pos_l1;
        out["xi_l1"] = d.xi_l1;
        return out;
      },
      py::arg("phi"), py::arg("eps"));

  m.def(
      "compute_record",
      [](const Array& phi, double eps, double m0, double surface_energy0, const std::string& kind, double alpha,
         double t, double int_lambda_sq, double dissipation) {
        return record_dict(compute_record(to_field(phi), params(eps, m0, kind, alpha), t, int_lambda_sq, dissipation,
                                          surface_energy0));
      },
      py::arg("phi"), py::arg("eps"), py::arg("m0"), py::arg("surface_energy0"), py::arg("kind") = "takasao",
      py::arg("alpha") = ModelParams::kDefaultAlpha, py::arg("t") = 0.0, py::arg("int_lambda_sq") = 0.0,
      py::arg("dissipation") = 0.0);

  m.def(
      "build_phi0",
      [](const py::dict& shape, int dim, int n, double eps, py::object clamp_width) {
        json doc = {{"grid", {{"dim", dim}, {"n", n}}}, {"model", {{"eps", eps}}}, {"shape", to_json(shape)}};
        if (!clamp_width.is_none()) doc["clamp_width"] = clamp_width.cast<double>();
        const RunConfig cfg = config_from_json(doc);
        const PreparedData pd = build_phi0(cfg.shape, cfg.grid(), cfg.eps, cfg.clamp_width);
        py::dict d;
        d["phi0"] = to_array(pd.phi0);
        d["m0"] = pd.m0;
        d["surface_energy0"] = pd.surface_energy0;
        return d;
      },
      py::arg("shape"), py::arg("dim"), py::arg("n"), py::arg("eps"), py::arg("clamp_width") = py::none(),
      "Well-prepared initial field for a shape dict in the configuration format.");

  m.def(
      "validate_config", [](const py::dict& doc) { return from_json(config_to_json(config_from_json(to_json(doc)))); },
      py::arg("config"), "Returns the configuration with defaults filled in; raises ConfigError.");

  m.def(
      "run",
      [](const py::dict& doc) {
        const RunConfig cfg = config_from_json(to_json(doc));
        std::optional<RunArtifacts> art;
        {
          py::gil_scoped_release release;
          art.emplace(execute(cfg));
        }
        return artifacts_dict(*art);
      },
      py::arg("config"));

  m.def("scenario_names", &scenario_names);
  m.def("scenario_document", [](const std::string& name) { return from_json(scenario_document(name)); }, py::arg("name"));
  m.def(
      "run_scenario",
      [](const std::string& name, const std::vector<std::string>& overrides, const std::string& output_dir) {
        std::optional<ScenarioReport> rep;
        {
          py::gil_scoped_release release;
          rep.emplace(run_scenario(name, overrides, output_dir));
        }
        py::dict d;
        d["name"] = rep->name;
        d["failures"] = rep->failures;
        d["exit_code"] = rep->exit_code();
        py::list runs;
        for (const auto& art : rep->runs) runs.append(artifacts_dict(art));
        d["runs"] = runs;
        if (rep->barrier) d["barrier_min_margin"] = rep->barrier->min_margin;
        return d;
      },
      py::arg("name"), py::arg("overrides") = std::vector<std::string>{}, py::arg("output_dir") = "");

  m.def(
      "read_snapshot",
      [](const std::string& path) {
        const Snapshot s = read_snapshot(path);
        py::dict d;
        d["kind"] = std::string(to_string(s.kind));
        d["eps"] = s.eps;
        d["alpha"] = s.alpha;
        d["t"] = s.t;
        d["m0"] = s.m0;
        d["surface_energy0"] = s.surface_energy0;
        d["phi"] = to_array(s.phi);
        return d;
      },
      py::arg("path"));
}
