#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "helmvp/basis.hpp"
#include "helmvp/bench.hpp"
#include "helmvp/error.hpp"
#include "helmvp/potential.hpp"
#include "helmvp/quadrature.hpp"
#include "helmvp/selftest.hpp"
#include "helmvp/specfun.hpp"

namespace py = pybind11;
using namespace helmvp;

namespace {

DEParams quadrature(double tau, double t_max) {
  DEParams p = experiment_quadrature();
  p.tau = tau;
  p.t_max = t_max;
  return p;
}

std::vector<cplx> test_potential(std::size_t n, double kappa_sq, int M, double h,
                                 std::vector<std::vector<double>> targets, double D,
                                 double r, double tau, double t_max, unsigned threads) {
  PotentialRequest req;
  req.M = M;
  req.kappa = std::sqrt(kappa_sq);
  req.grid.h = h;
  req.grid.D = D;
  req.grid.r = r;
  req.grid.box = Box::cube(n, -1.0, 1.0);
  req.density = sample(helmholtz_test_density(n, kappa_sq), req.grid);
  req.targets = std::move(targets);
  req.quadrature = quadrature(tau, t_max);
  req.threads = threads;
  py::gil_scoped_release release;
  return box_potential(req);
}

py::list convergence(std::size_t n, double kappa_sq, int M, std::vector<int> ladder,
                     double tau, double t_max, unsigned threads) {
  ExperimentConfig c;
  c.n = n;
  c.kappa_sq = kappa_sq;
  c.M = M;
  c.h_ladder = std::move(ladder);
  c.quadrature = quadrature(tau, t_max);
  c.threads = threads;
  c.validate();
  std::vector<ConvergenceRow> rows;
  {
    py::gil_scoped_release release;
    rows = run_convergence(c);
  }
  py::list out;
  for (const auto& row : rows) {
    py::dict d;
    d["inv_h"] = row.inv_h;
    d["abs_error"] = row.abs_error;
    d["rate"] = row.rate ? py::cast(*row.rate) : py::none();
    d["error"] = row.error;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_helmvp, m) {
  m.doc() = "Approximate Helmholtz volume potentials";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error((std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def("faddeeva", [](cplx z) { return faddeeva(z).value; }, py::arg("z"),
        "Faddeeva function w(z) = exp(-z^2) erfc(-iz).");
  m.def("erfc", &erfc_complex, py::arg("z"));
  m.def(
      "psi", [](int M, double x, double theta, double y) { return psi_stable(M, {x, theta, y}); },
      py::arg("M"), py::arg("x"), py::arg("theta"), py::arg("y"),
      "Psi_M(x, i*theta, y) in the cancellation-free form.");
  m.def(
      "p_m", [](int M, double x, cplx t) { return p_m(M, x, t); }, py::arg("M"), py::arg("x"),
      py::arg("t"));
  m.def(
      "phi", [](double u) { return phi(u, 6.0, 4.0); }, py::arg("u"),
      "Double-exponential substitution t = Phi(u) with a=6, b=4.");
  m.def("exact_solution", &exact_solution, py::arg("x"));
  m.def("gaussian_potential_3d", &gaussian_potential_3d, py::arg("x"), py::arg("kappa"));
  m.def("test_potential", &test_potential, py::arg("n"), py::arg("kappa_sq"), py::arg("M"),
        py::arg("h"), py::arg("targets"), py::arg("D") = 3.0, py::arg("r") = 5.0,
        py::arg("tau") = 1e-6, py::arg("t_max") = kExperimentTMax, py::arg("threads") = 0u,
        "Box potential over [-1,1]^n of the manufactured test density.");
  m.def("convergence", &convergence, py::arg("n"), py::arg("kappa_sq"), py::arg("M"),
        py::arg("h_ladder"), py::arg("tau") = 1e-6, py::arg("t_max") = kExperimentTMax,
        py::arg("threads") = 0u,
        "Absolute error at (0.2, 0, ..., 0) and observed rates over 1/h values.");
  m.def(
      "selftest",
      [](unsigned threads) {
        py::dict out;
        for (const auto& mod : run_selftest(threads))
          out[py::str(mod.name)] = py::make_tuple(mod.passed, mod.failed);
        return out;
      },
      py::arg("threads") = 0u);
}
