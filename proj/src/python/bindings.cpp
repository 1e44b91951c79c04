#include "pwidths/error.hpp"
#include "pwidths/lattice.hpp"
#include "pwidths/phase_field.hpp"
#include "pwidths/reports.hpp"
#include "pwidths/scattering.hpp"
#include "pwidths/surface.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_python(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict report(pwidths::RunResult r) {
  r.json["passed"] = r.passed();
  r.json["failures"] = r.failures;
  py::dict d = to_python(r.json);
  if (!r.csv.empty()) d["csv"] = r.csv;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = PWIDTHS_VERSION;

  static py::handle error_type =
      py::exception<pwidths::Error>(m, "PwidthsError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const pwidths::Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("kind") = std::string(pwidths::to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  m.def("widths_table", [](long long pmax) { return report(pwidths::run_widths_table(pmax)); },
        py::arg("pmax"));
  m.def("quantize", [](const std::string& mu, long long k) { return report(pwidths::run_quantize(mu, k)); },
        py::arg("mu"), py::arg("m"));
  m.def(
      "crofton",
      [](int k, int trials, long long samples, std::uint64_t seed, int threads) {
        auto r = [&] {
          py::gil_scoped_release nogil;
          return pwidths::run_crofton(k, trials, samples, seed, threads);
        }();
        return report(std::move(r));
      },
      py::arg("k"), py::arg("trials") = 10, py::arg("samples") = 100000, py::arg("seed") = 0,
      py::arg("threads") = 1);
  m.def("minmax1", [](const std::vector<double>& eps, int grid) { return report(pwidths::run_minmax1(eps, grid)); },
        py::arg("eps_list") = std::vector<double>{0.1, 0.05, 0.02}, py::arg("grid") = 4096);
  m.def(
      "glue",
      [](const std::vector<double>& dirs, double eps, double L, int grid) {
        return report(pwidths::run_glue(dirs, eps, L, grid));
      },
      py::arg("dirs") = std::vector<double>{90, 270}, py::arg("eps") = 1.0, py::arg("L") = 25.0,
      py::arg("grid") = 256);
  m.def(
      "scatter",
      [](const py::object& field, int thetas, int threads) {
        return report(pwidths::run_scatter(from_python(field), thetas, threads));
      },
      py::arg("field"), py::arg("thetas") = 512, py::arg("threads") = 1);
  m.def(
      "nets",
      [](const py::object& surface, const std::string& preset, int Q, bool relax, double perturb,
         std::uint64_t seed) { return report(pwidths::run_nets(from_python(surface), preset, Q, relax, perturb, seed)); },
      py::arg("surface"), py::arg("preset") = "equator", py::arg("Q") = 8, py::arg("relax") = false,
      py::arg("perturb") = 0.0, py::arg("seed") = 0);
  m.def("ellipsoid_tune", [](double mu) { return report(pwidths::run_ellipsoid_tune(mu)); }, py::arg("mu"));

  m.def("h0", [] { return pwidths::h0(); });
  m.def("isqrt", &pwidths::isqrt, py::arg("p"));
  m.def("weyl_constant", [](long long pmax) { return pwidths::weyl_constant(pwidths::width_table(pmax, false)); },
        py::arg("pmax"));
  m.def(
      "principal_geodesic_lengths",
      [](double a1, double a2, double a3) { return pwidths::principal_geodesic_lengths(a1, a2, a3).ell; },
      py::arg("a1"), py::arg("a2"), py::arg("a3"));
  m.def(
      "principal_lengths_jacobian",
      [](const std::array<double, 3>& a, double h) { return pwidths::principal_lengths_jacobian(a, h); },
      py::arg("a"), py::arg("h") = 1e-5);
  m.def(
      "solve_axisymmetric",
      [](double eps, int N) {
        const auto sol = pwidths::solve_axisymmetric(eps, N);
        py::dict d;
        d["grid"] = Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(sol.state.grid.data(), sol.state.grid.size()));
        d["values"] = sol.state.values;
        d["energy"] = pwidths::energy(sol.state);
        d["mass"] = pwidths::varifold_mass(sol.state);
        d["index"] = sol.index;
        d["residual"] = sol.residual;
        d["iterations"] = sol.iterations;
        return d;
      },
      py::arg("eps"), py::arg("N") = 4096);
  m.def(
      "kink_transmission",
      [](pwidths::cplx lambda) { return pwidths::jost_solve(pwidths::ShiftedField::kink(), lambda).a_value; },
      py::arg("lam"));
}
