#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "mmfem/errors.hpp"
#include "mmfem/harness.hpp"

namespace py = pybind11;
using namespace mmfem;

namespace {

std::string setting_text(const py::handle& v) {
  if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "true" : "false";
  if (py::isinstance<py::float_>(v)) {
    std::ostringstream s;
    s.precision(17);
    s << v.cast<double>();
    return s.str();
  }
  return py::str(v).cast<std::string>();
}

StudyConfig make_config(const std::string& problem, const py::kwargs& settings) {
  StudyConfig c = preset(problem);
  for (const auto& [k, v] : settings) apply_setting(c, k.cast<std::string>(), setting_text(v));
  c.validate();
  return c;
}

py::dict run_dict(const RunResult& r) {
  py::dict d;
  d["level"] = r.level;
  d["ok"] = r.ok;
  d["failure_code"] = r.failure_code;
  d["failure"] = r.failure;
  d["n_elements"] = r.n_elements;
  d["dt"] = r.dt;
  d["steps"] = r.steps;
  d["dt_adjusted"] = r.dt_adjusted;
  d["error_u"] = r.error_u;
  d["error_x"] = r.error_x;
  d["theta_initial"] = r.theta_initial;
  d["theta_final"] = r.theta_final;
  d["tracked_min"] = r.tracked_min;
  d["tracked_max"] = r.tracked_max;
  d["time"] = r.final_state.time;
  d["vertices"] = r.final_state.vertices;
  py::list phases;
  for (const auto& f : r.final_state.phases) phases.append(f.coefficients);
  d["solution"] = phases;
  d["tracked"] = r.final_state.tracked;
  d["files"] = r.files;
  return d;
}

py::dict record_dict(const ErrorRecord& e) {
  py::dict d;
  d["level"] = e.level;
  d["n_elements"] = e.n_elements;
  d["dt"] = e.dt;
  d["error_u"] = e.error_u;
  d["error_x"] = e.error_x;
  d["order_u"] = e.order_u;
  d["order_x"] = e.order_x;
  d["floored_u"] = e.floored_u;
  d["floored_x"] = e.floored_x;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mmfem, m) {
  m.doc() = "Arbitrary-order moving-mesh finite elements for 1D moving boundary problems";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  py::class_<StefanParameters>(m, "StefanParameters")
      .def(py::init<>())
      .def_readwrite("k_solid", &StefanParameters::k_solid)
      .def_readwrite("k_liquid", &StefanParameters::k_liquid)
      .def_readwrite("K_solid", &StefanParameters::K_solid)
      .def_readwrite("K_liquid", &StefanParameters::K_liquid)
      .def_readwrite("latent", &StefanParameters::latent)
      .def_readwrite("u_solid", &StefanParameters::u_solid)
      .def_readwrite("u_liquid", &StefanParameters::u_liquid)
      .def_readwrite("t0", &StefanParameters::t0);

  m.def("stefan_phi_root", [](const StefanParameters& p) { return stefan_phi_root(p); },
        py::arg("params") = StefanParameters{});
  m.def("stefan_interface", [](double t, const StefanParameters& p) {
    return StefanSolution(p).interface(t);
  }, py::arg("t"), py::arg("params") = StefanParameters{});
  m.def("cg_exact", &cg_exact, py::arg("x"), py::arg("t"));
  m.def("pme_similarity", [](double x, double t, int m_exp, double x0) {
    return PmeSimilarity{m_exp, x0}.value(x, t);
  }, py::arg("x"), py::arg("t"), py::arg("m") = 1, py::arg("x0") = 0.5);

  m.def("uniform_mesh", [](double a, double b, std::size_t n) {
    return build_uniform(a, b, n, 1).vertices();
  }, py::arg("a"), py::arg("b"), py::arg("n"));
  m.def("stefan_bisection_mesh", [](int refinements, double s) {
    return build_stefan_bisection(1, refinements, s).vertices();
  }, py::arg("refinements"), py::arg("interface_position"));
  m.def("stefan_geometric_mesh", [](int refinements, double s) {
    return build_stefan_geometric(1, refinements, s).vertices();
  }, py::arg("refinements"), py::arg("interface_position"));
  m.def("dof_points", [](const std::vector<double>& v, int degree) { return dof_points(v, degree); },
        py::arg("vertices"), py::arg("degree"));

  py::class_<StudyConfig>(m, "StudyConfig")
      .def(py::init(&make_config), py::arg("problem") = "cg")
      .def("set", [](StudyConfig& c, const std::string& k, const py::handle& v) {
        apply_setting(c, k, setting_text(v));
      })
      .def("validate", &StudyConfig::validate)
      .def("to_text", [](const StudyConfig& c) { return to_config_text(c); })
      .def_property_readonly("rk_order", &StudyConfig::effective_rk_order)
      .def_readwrite("problem", &StudyConfig::problem)
      .def_readwrite("degree", &StudyConfig::degree)
      .def_readwrite("levels", &StudyConfig::levels)
      .def_readwrite("dt", &StudyConfig::dt)
      .def_readwrite("out", &StudyConfig::out)
      .def_readwrite("write_files", &StudyConfig::write_files)
      .def("__repr__", [](const StudyConfig& c) { return "<StudyConfig " + output_stem(c, 0) + ">"; });

  m.def("config_keys", &config_keys);
  m.def("parse_config", [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  }, py::arg("text"));
  m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));
  m.def("output_stem", &output_stem, py::arg("config"), py::arg("level"));

  m.def("run_simulation", [](const StudyConfig& c, int level) {
    RunResult r;
    {
      py::gil_scoped_release release;
      r = run_simulation(c, level);
    }
    return run_dict(r);
  }, py::arg("config"), py::arg("level") = 0);

  m.def("run_convergence_study", [](const StudyConfig& c, bool self_convergence) {
    StudyResult st;
    {
      py::gil_scoped_release release;
      st = run_convergence_study(c, self_convergence);
    }
    py::dict d;
    py::list runs, records;
    for (const auto& r : st.runs) runs.append(run_dict(r));
    for (const auto& e : st.records) records.append(record_dict(e));
    d["runs"] = runs;
    d["records"] = records;
    d["self_convergence"] = st.self_convergence;
    d["ok"] = st.all_ok();
    d["files"] = st.files;
    return d;
  }, py::arg("config"), py::arg("self_convergence") = false);
}
