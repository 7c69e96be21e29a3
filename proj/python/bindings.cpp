#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "varheat/estimators.hpp"
#include "varheat/experiments.hpp"
#include "varheat/gaussian.hpp"
#include "varheat/kernel.hpp"
#include "varheat/spde.hpp"
#include "varheat/variations.hpp"

namespace py = pybind11;
using namespace varheat;

namespace {

SigmaSpec sigma_from(const std::string& text) { return SigmaSpec::parse(text); }

kernel::KernelParams kparams(double alpha, double abs_tol) {
  kernel::KernelParams p;
  p.alpha = alpha;
  p.abs_tol = abs_tol;
  return p;
}

}  // namespace

PYBIND11_MODULE(_varheat, m) {
  m.doc() = "fractional stochastic heat equation toolkit (C++ core)";

  py::register_exception<numerical_error>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<estimator_undefined>(m, "EstimatorUndefined", PyExc_ValueError);
  py::register_exception<degenerate_input>(m, "DegenerateInput", PyExc_ValueError);

  py::class_<Path>(m, "Path")
      .def_readonly("grid_n", &Path::grid_n)
      .def_readonly("values", &Path::values)
      .def_readonly("spatial_point", &Path::spatial_point)
      .def_property_readonly("meta", [](const Path& p) { return to_string(p.meta); })
      .def("__len__", [](const Path& p) { return p.values.size(); });

  m.def(
      "green_kernel_value",
      [](double alpha, double t, double x, double abs_tol) {
        return kernel::green_kernel_value(kparams(alpha, abs_tol), t, x);
      },
      py::arg("alpha"), py::arg("t"), py::arg("x"), py::arg("abs_tol") = 1e-9);
  m.def(
      "kernel_l2_time_integral",
      [](double alpha, double s, double t) {
        return kernel::kernel_l2_time_integral(kparams(alpha, 1e-9), s, t);
      },
      py::arg("alpha"), py::arg("s"), py::arg("t"));
  m.def(
      "kernel_property_check",
      [](double alpha, double t) {
        const auto r = kernel::kernel_property_check(kparams(alpha, 1e-9), t);
        py::dict d;
        d["normalization_error"] = r.normalization_error;
        d["symmetry_error"] = r.symmetry_error;
        d["scaling_error"] = r.scaling_error;
        d["sandwich_min"] = r.sandwich_min;
        d["sandwich_max"] = r.sandwich_max;
        d["all_positive"] = r.all_positive;
        return d;
      },
      py::arg("alpha"), py::arg("t"));

  m.def("fbm_covariance", &gaussian::fbm_covariance, py::arg("hurst"), py::arg("s"),
        py::arg("t"));
  m.def("rho", &gaussian::rho, py::arg("hurst"), py::arg("v"));
  m.def("sample_fbm", &gaussian::sample_fbm, py::arg("hurst"), py::arg("grid_n"),
        py::arg("seed"), py::arg("replicate") = 0);
  m.def(
      "sample_perturbed_fbm",
      [](double c0, double hurst, double c_y, int grid_n, std::uint64_t seed,
         std::uint64_t replicate) {
        return gaussian::sample_perturbed_fbm({c0, hurst, c_y}, grid_n, seed, replicate);
      },
      py::arg("c0"), py::arg("hurst"), py::arg("perturbation_scale"), py::arg("grid_n"),
      py::arg("seed"), py::arg("replicate") = 0);
  m.def(
      "u0_time_covariance",
      [](double alpha, double s, double t) {
        return gaussian::u0_time_covariance(kparams(alpha, 1e-9), s, t);
      },
      py::arg("alpha"), py::arg("s"), py::arg("t"));
  m.def(
      "sample_u0_path",
      [](double alpha, int grid_n, std::uint64_t seed, std::uint64_t replicate, int cap) {
        return gaussian::sample_u0_path(kparams(alpha, 1e-9), grid_n, seed, replicate, cap);
      },
      py::arg("alpha"), py::arg("grid_n"), py::arg("seed"), py::arg("replicate") = 0,
      py::arg("factorization_cap") = 8192);
  m.def(
      "c0_alpha",
      [](double alpha, double base_time) { return gaussian::c0_alpha(kparams(alpha, 1e-9), base_time); },
      py::arg("alpha"), py::arg("base_time") = 1.0);
  m.def(
      "b0_alpha", [](double alpha) { return gaussian::b0_alpha(kparams(alpha, 1e-9)); },
      py::arg("alpha"));

  m.def(
      "solve_nonlinear",
      [](double alpha, double theta, const std::string& sigma, int observe_n, double t_horizon,
         std::uint64_t seed, std::uint64_t replicate, int n_time, int n_space,
         double half_length) {
        spde::SimConfig cfg;
        cfg.alpha = alpha;
        cfg.theta = theta;
        cfg.sigma = sigma_from(sigma);
        cfg.observe_n = observe_n;
        cfg.t_horizon = t_horizon;
        cfg.seed = seed;
        cfg.n_time = n_time;
        cfg.n_space = n_space;
        cfg.half_length = half_length;
        return spde::solve_nonlinear(cfg, replicate).path;
      },
      py::arg("alpha"), py::arg("theta"), py::arg("sigma"), py::arg("observe_n"),
      py::arg("t_horizon") = 1.0, py::arg("seed") = 0, py::arg("replicate") = 0,
      py::arg("n_time") = 0, py::arg("n_space") = 0, py::arg("half_length") = 0.0);
  m.def(
      "solve_parametrized",
      [](double alpha, double theta, const std::string& sigma, int observe_n,
         std::uint64_t seed, std::uint64_t replicate, int n_space, double half_length) {
        spde::SimConfig cfg;
        cfg.alpha = alpha;
        cfg.theta = theta;
        cfg.sigma = sigma_from(sigma);
        cfg.observe_n = observe_n;
        cfg.seed = seed;
        cfg.n_space = n_space;
        cfg.half_length = half_length;
        return spde::solve_parametrized(cfg, replicate).path;
      },
      py::arg("alpha"), py::arg("theta"), py::arg("sigma"), py::arg("observe_n"),
      py::arg("seed") = 0, py::arg("replicate") = 0, py::arg("n_space") = 0,
      py::arg("half_length") = 0.0);

  m.def(
      "quad_variation_renorm",
      [](const Path& p, double alpha) {
        return variations::quad_variation_renorm(p, alpha).statistic;
      },
      py::arg("path"), py::arg("alpha"));
  m.def(
      "power_variation",
      [](const Path& p, double order) { return variations::power_variation(p, order).statistic; },
      py::arg("path"), py::arg("p"));
  m.def(
      "fbm_normalized_variation",
      [](const Path& p, double hurst) {
        return variations::fbm_normalized_variation(p, hurst).statistic;
      },
      py::arg("path"), py::arg("hurst"));
  m.def(
      "riemann_sigma_sum",
      [](const Path& p, const std::string& sigma, double q) {
        return variations::riemann_sigma_sum(p, sigma_from(sigma), q);
      },
      py::arg("path"), py::arg("sigma"), py::arg("q"));
  m.def("admissible_alpha", &variations::admissible_alpha, py::arg("p"));

  m.def(
      "estimate_alpha",
      [](const Path& p, const std::string& sigma) {
        const auto r = estimators::estimate_alpha(p, sigma_from(sigma));
        py::dict d;
        d["estimate"] = r.estimate;
        d["a_n"] = r.a_n ? py::cast(*r.a_n) : py::none();
        d["riemann_sum"] = r.riemann_sum;
        d["n"] = r.grid_n;
        return d;
      },
      py::arg("path"), py::arg("sigma") = "constant:1");
  m.def(
      "estimate_theta_quadratic",
      [](const Path& p, double alpha, const std::string& sigma, double c0) {
        return estimators::estimate_theta_quadratic(p, alpha, sigma_from(sigma), c0).estimate;
      },
      py::arg("path"), py::arg("alpha"), py::arg("sigma"), py::arg("c0"));
  m.def(
      "estimate_theta_power",
      [](const Path& p, double alpha, const std::string& sigma, double b0) {
        return estimators::estimate_theta_power(p, alpha, sigma_from(sigma), b0).estimate;
      },
      py::arg("path"), py::arg("alpha"), py::arg("sigma"), py::arg("b0"));
  m.def(
      "theoretical_limits",
      [](double alpha, double theta, double m2, double mp) {
        const auto lim = estimators::theoretical_limits(alpha, theta, m2, mp);
        py::dict d;
        d["v_limit"] = lim.v_limit;
        d["u_limit"] = lim.u_limit ? py::cast(*lim.u_limit) : py::none();
        d["c0"] = lim.c0;
        d["b0"] = lim.b0 ? py::cast(*lim.b0) : py::none();
        return d;
      },
      py::arg("alpha"), py::arg("theta"), py::arg("sigma_moment_2"), py::arg("sigma_moment_p"));

  m.attr("__version__") = "0.1.0";
}
