// Python bindings. Fields cross the boundary as C-ordered float64 arrays of
// shape (N,)*n, axis d holding coordinate x_d; configs and reports cross as
// JSON text and are decoded on the Python side.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "pmelimit/harness.hpp"

namespace py = pybind11;
using namespace pmelimit;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ScalarField to_field(const Array& a, double L) {
  const int n = static_cast<int>(a.ndim());
  if (n < 1 || n > 3) throw Error(ErrorKind::DimensionUnsupported, "arrays must have 1 to 3 axes");
  const auto N = a.shape(0);
  for (int d = 1; d < n; ++d) {
    if (a.shape(d) != N) throw Error(ErrorKind::InvalidArgument, "arrays must be square (N cells per axis)");
  }
  const GridSpec g = GridSpec::make(n, L, static_cast<int>(N));
  return ScalarField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const ScalarField& f) {
  const GridSpec& g = f.spec();
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(g.dim()), g.cells_per_axis());
  Array out(shape);
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

Array to_array(const VectorField& v) {
  const GridSpec& g = v.spec();
  std::vector<py::ssize_t> shape{g.dim()};
  shape.insert(shape.end(), static_cast<std::size_t>(g.dim()), g.cells_per_axis());
  Array out(shape);
  double* dst = out.mutable_data();
  for (int d = 0; d < g.dim(); ++d) dst = std::copy(v[d].data().begin(), v[d].data().end(), dst);
  return out;
}

RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
  return RunConfig::from_json(j);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of pmelimit";

  // Held for the life of the interpreter; instances carry the error kind.
  static py::handle error_type = py::exception<Error>(m, "Error", PyExc_RuntimeError).inc_ref();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      exc.attr("numerical") = e.is_numerical();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.attr("SUMMARY_SCHEMA_VERSION") = kSummarySchemaVersion;

  m.def("default_config_json", [] { return RunConfig{}.to_json().dump(2); });
  m.def("normalize_config_json", [](const std::string& text) { return parse_config(text).to_json().dump(2); },
        py::arg("config"), "Validate a config and fill in defaults.");

  m.def(
      "run_sweep_json",
      [](const std::string& text, int threads, const std::string& out) {
        const RunConfig config = parse_config(text);
        SweepReport report;
        {
          py::gil_scoped_release release;
          report = run_m_sweep(config, threads);
          if (!out.empty()) export_report(report, out);
        }
        return summary_json(report).dump();
      },
      py::arg("config"), py::arg("threads") = 1, py::arg("out") = "");

  m.def(
      "run_single",
      [](const std::string& text, double exponent) {
        RunConfig config = parse_config(text);
        config.snapshots = std::max(config.snapshots, 2);  // the last one is the state at T
        MRun run;
        {
          py::gil_scoped_release release;
          run = run_single(config, exponent, false);
        }
        return py::make_tuple(to_json(run.records), to_array(run.snapshots.back().field), run.steps);
      },
      py::arg("config"), py::arg("m"));

  m.def(
      "run_refinement_json",
      [](const std::string& text, std::vector<int> N_list, const std::string& out) {
        const RunConfig config = parse_config(text);
        if (N_list.empty()) N_list = config.refine.N_list;
        RefinementReport report;
        {
          py::gil_scoped_release release;
          report = run_refinement_study(config, N_list);
          if (!out.empty()) export_refinement(report, out);
        }
        return refinement_json(report).dump();
      },
      py::arg("config"), py::arg("N_list") = std::vector<int>{}, py::arg("out") = "");

  m.def(
      "operator_checks",
      [] {
        py::list out;
        for (const auto& c : run_operator_checks()) {
          py::dict d;
          d["name"] = c.name;
          d["passed"] = c.passed;
          d["value"] = c.value;
          d["threshold"] = c.threshold;
          d["lower_bound"] = c.lower_bound;
          out.append(d);
        }
        return out;
      });

  m.def(
      "solve_newtonian",
      [](const Array& rho, double L) {
        const Potential pot = solve_newtonian(to_field(rho, L));
        return py::make_tuple(to_array(pot.phi), to_array(pot.grad_phi));
      },
      py::arg("rho"), py::arg("L"), "Returns (phi, grad_phi); grad_phi has a leading axis of length n.");

  m.def(
      "pressure", [](const Array& rho, double exponent) { return to_array(pressure(to_field(rho, 1.0), exponent)); },
      py::arg("rho"), py::arg("m"));
  m.def(
      "gradient", [](const Array& f, double L) { return to_array(gradient(to_field(f, L))); }, py::arg("f"),
      py::arg("L"));
  m.def(
      "laplacian", [](const Array& f, double L) { return to_array(laplacian(to_field(f, L))); }, py::arg("f"),
      py::arg("L"));
  m.def(
      "integrate", [](const Array& f, double L) { return integrate(to_field(f, L)); }, py::arg("f"), py::arg("L"));

  m.def(
      "identity_check_fund1",
      [](const Array& p, double L) {
        const Fund1Check c = identity_check_fund1(to_field(p, L));
        py::dict d;
        d["lhs"] = c.lhs;
        d["rhs"] = c.rhs;
        d["rel_err"] = c.rel_err;
        return d;
      },
      py::arg("p"), py::arg("L"));

  m.def(
      "barenblatt",
      [](int n, double exponent, double C, double L, int N, double tau, bool average) {
        const Barenblatt b{n, exponent, C};
        const GridSpec g = GridSpec::make(n, L, N);
        return to_array(average ? b.cell_average(g, tau) : b.sample(g, tau));
      },
      py::arg("n"), py::arg("m"), py::arg("C"), py::arg("L"), py::arg("N"), py::arg("tau"),
      py::arg("cell_average") = true);

  m.def(
      "read_snapshot",
      [](const std::string& path) {
        const Snapshot s = read_snapshot(path);
        py::dict d;
        d["rho"] = to_array(s.field);
        d["t"] = s.time;
        d["m"] = s.exponent;
        d["L"] = s.field.spec().half_width();
        return d;
      },
      py::arg("path"));
}
