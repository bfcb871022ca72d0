// Python module tgquench._core: engine, quench results and the config/run entry points.

#include "tgquench/config.hpp"
#include "tgquench/ho_basis.hpp"
#include "tgquench/observables.hpp"
#include "tgquench/quench.hpp"
#include "tgquench/runner.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

namespace py = pybind11;
using namespace tgq;

namespace {

Representation parse_representation(const std::string& name) {
  if (name == "full") return Representation::Full;
  if (name == "com_ground") return Representation::ComGround;
  throw py::value_error("representation must be 'full' or 'com_ground', got '" + name + "'");
}

// Vectorises a scalar function of time over a 1-D array.
template <class F>
py::array_t<double> over_times(py::array_t<double, py::array::c_style | py::array::forcecast> t, F&& f) {
  auto in = t.unchecked<1>();
  py::array_t<double> out(in.shape(0));
  auto o = out.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < in.shape(0); ++i) o(i) = f(in(i));
  return out;
}

py::dict outcome_dict(const ConfigOutcome& outcome) {
  auto issues = [](const std::vector<ConfigIssue>& v) {
    py::list l;
    for (const auto& i : v) l.append(py::make_tuple(i.field, i.message));
    return l;
  };
  py::dict d;
  d["ok"] = outcome.ok();
  d["errors"] = issues(outcome.errors);
  d["warnings"] = issues(outcome.warnings);
  d["text"] = outcome.ok() ? py::object(py::str(outcome.config.to_text())) : py::object(py::none());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quench dynamics of two trapped bosons and an impurity";

  py::register_exception<BasisError>(m, "BasisError", PyExc_ValueError);
  py::register_exception<ObservableError>(m, "ObservableError", PyExc_ValueError);

  m.def("ho_energy", &ho_energy, py::arg("n"));
  m.def("eval_ho", [](int n, py::array_t<double, py::array::c_style | py::array::forcecast> x) {
    return over_times(x, [n](double v) { return eval_ho(n, v); });
  }, py::arg("n"), py::arg("x"));

  py::class_<QuenchResult>(m, "QuenchResult")
      .def_readonly("e0", &QuenchResult::e0)
      .def_readonly("weight_sum", &QuenchResult::weight_sum)
      .def_property_readonly("energies", [](const QuenchResult& q) { return Eigen::VectorXd(q.energies); })
      .def_property_readonly("overlaps", [](const QuenchResult& q) { return Eigen::VectorXd(q.overlaps); })
      .def_property_readonly("spectral_width", &QuenchResult::spectral_width)
      .def("loschmidt_echo", [](const QuenchResult& q, py::array_t<double, py::array::c_style | py::array::forcecast> t) {
        return over_times(t, [&](double s) { return loschmidt_echo(q, s); });
      }, py::arg("t"))
      .def("loschmidt_amplitude", &loschmidt_amplitude, py::arg("t"))
      .def("spectral_function", [](const QuenchResult& q, double eta, const std::vector<double>& omega) {
        const auto s = spectral_function(q, eta, omega);
        return py::array_t<double>(static_cast<py::ssize_t>(s.values.size()), s.values.data());
      }, py::arg("eta"), py::arg("omega"));

  py::class_<QuenchEngine>(m, "QuenchEngine")
      .def(py::init([](int n_tot, double g_A, int n_max, const std::string& representation) {
        QuenchSetup s;
        s.n_tot = n_tot;
        s.n_max = n_max;
        s.g_A = g_A;
        s.representation = parse_representation(representation);
        return std::make_unique<QuenchEngine>(s);
      }), py::arg("n_tot"), py::arg("g_A") = 25.0, py::arg("n_max") = -1, py::arg("representation") = "com_ground")
      .def_property_readonly("dim", [](const QuenchEngine& e) { return e.operators().dim(); })
      .def_property_readonly("basis_size", [](const QuenchEngine& e) { return e.basis().size(); })
      .def_property_readonly("initial_energy", [](const QuenchEngine& e) { return e.initial().energy; })
      .def("quench", &QuenchEngine::quench, py::arg("g_AB"), py::call_guard<py::gil_scoped_release>())
      .def("entropies", [](const QuenchEngine& e, const QuenchResult& q, double t) {
        const auto psi = evolve_state(q, t);
        return py::make_tuple(pair_entropy(psi, e.basis()), vne(rspdm_A(psi, e.basis())), vne(rspdm_B(psi, e.basis())));
      }, py::arg("result"), py::arg("t"), "(S_AB, S_A, S_B) in bits at time t");

  m.def("preset_names", &preset_names);
  m.def("preset_text", &preset_text, py::arg("name"));
  m.def("validate_config", [](const ConfigMap& map) { return outcome_dict(validate_config(map)); }, py::arg("config"),
        "Validate a key/value config; returns ok, errors, warnings and the resolved text.");
  m.def("run", [](const ConfigMap& map) {
    const auto outcome = validate_config(map);
    if (!outcome.ok()) {
      const auto& e = outcome.errors.front();
      throw py::value_error(e.field + ": " + e.message);
    }
    RunSummary summary;
    {
      py::gil_scoped_release release;
      summary = run(outcome.config);
    }
    return py::make_tuple(summary.exit_code, summary.reason);
  }, py::arg("config"), "Run a sweep; returns (exit_code, reason).");
}
