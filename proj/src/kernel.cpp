#include "varheat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "varheat/quadrature.hpp"

namespace varheat::kernel {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Leading coefficients of the large-|x| expansion of the cosine transform:
// G(t, x) ~ (1/pi) sum_k (-1)^{k+1} Gamma(k a + 1) sin(k pi a / 2) t^k / (k! x^{1+ka}).
double tail_series_coeff(double alpha, int k) {
  double kfact = 1.0;
  for (int j = 2; j <= k; ++j) kfact *= j;
  return std::tgamma(k * alpha + 1.0) * std::sin(0.5 * k * kPi * alpha) / (kPi * kfact);
}

// \int_{|y| > x} G_alpha(t, y) dy for x well inside the power-law regime.
// Returns the 3-term value and an estimate of the truncation error.
struct TailMass {
  double value;
  double trunc;
};

TailMass stable_tail_mass(double alpha, double t, double x) {
  if (alpha >= 2.0) {
    // Gaussian: exact complementary tail
    return {std::erfc(x / (2.0 * std::sqrt(t))), 0.0};
  }
  double value = 0.0;
  double sign = 1.0;
  double tk = t;
  double last = 0.0;
  for (int k = 1; k <= 3; ++k) {
    last = sign * 2.0 * tail_series_coeff(alpha, k) * tk / (k * alpha) * std::pow(x, -k * alpha);
    value += last;
    sign = -sign;
    tk *= t;
  }
  // alternating with rapidly decreasing terms: next term bounds the error
  const double next =
      2.0 * tail_series_coeff(alpha, 4) * tk / (4.0 * alpha) * std::pow(x, -4.0 * alpha);
  return {value, std::abs(next) + std::abs(last) * 1e-2};
}

}  // namespace

void KernelParams::validate() const {
  if (!(alpha > 1.0) || !(alpha <= 2.0))
    throw std::invalid_argument("KernelParams: alpha must lie in (1, 2]");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("KernelParams: abs_tol must be positive");
  if (tail_cutoff < 0.0) throw std::invalid_argument("KernelParams: tail_cutoff must be >= 0");
}

double KernelParams::cutoff_for(double t) const {
  if (tail_cutoff > 0.0) return tail_cutoff;
  const double target = std::max(std::log(1.0 / abs_tol), 1.0) + 4.0;
  return std::pow(target / t, 1.0 / alpha);
}

double green_kernel_value(const KernelParams& params, double t, double x) {
  params.validate();
  if (!(t > 0.0)) throw std::invalid_argument("green_kernel_value: t must be positive");
  const double xi_max = params.cutoff_for(t);
  const double cap = x != 0.0 ? kPi / (2.0 * std::abs(x)) : 0.0;
  const double alpha = params.alpha;
  auto f = [&](double xi) { return std::cos(x * xi) * std::exp(-t * std::pow(xi, alpha)); };
  return quad::integrate(f, 0.0, xi_max, params.abs_tol, cap) / kPi;
}

double c_alpha(const KernelParams& params) {
  params.validate();
  // (1/pi) \int_0^inf e^{-2 xi^alpha} dxi = 2^{-1/alpha} Gamma(1 + 1/alpha) / pi
  return std::pow(2.0, -1.0 / params.alpha) * std::tgamma(1.0 + 1.0 / params.alpha) / kPi;
}

double c_alpha_quadrature(const KernelParams& params) {
  params.validate();
  const double xi_max = params.cutoff_for(2.0);
  const double alpha = params.alpha;
  auto f = [&](double xi) { return std::exp(-2.0 * std::pow(xi, alpha)); };
  return quad::integrate(f, 0.0, xi_max, params.abs_tol) / kPi;
}

double kernel_l2_time_integral(const KernelParams& params, double s, double t) {
  params.validate();
  if (s < 0.0 || s > t) throw std::invalid_argument("kernel_l2_time_integral: need 0 <= s <= t");
  const double a = params.alpha;
  return c_alpha(params) * (a / (a - 1.0)) * std::pow(t - s, 1.0 - 1.0 / a);
}

double kernel_l2_time_integral_quadrature(const KernelParams& params, double s, double t) {
  params.validate();
  if (s < 0.0 || s > t) throw std::invalid_argument("kernel_l2_time_integral: need 0 <= s <= t");
  if (s == t) return 0.0;
  const double a = params.alpha;
  const double tau = t - s;
  // (1/(2 pi)) \int_0^inf (1 - e^{-2 tau xi^a}) xi^-a dxi, doubled for the full
  // line; the xi^-a tail past the cutoff is added in closed form.
  const double xi_max = std::pow((std::log(1.0 / params.abs_tol) + 4.0) / (2.0 * tau), 1.0 / a);
  auto f = [&](double xi) {
    if (xi == 0.0) return 2.0 * tau;  // continuous extension
    return (1.0 - std::exp(-2.0 * tau * std::pow(xi, a))) * std::pow(xi, -a);
  };
  const double body = quad::integrate(f, 0.0, xi_max, params.abs_tol);
  const double tail = std::pow(xi_max, 1.0 - a) / (a - 1.0);
  return (body + tail) / (2.0 * kPi);
}

KernelIntegralReport increment_kernel_integral(const KernelParams& params, double s, double t,
                                               double delta) {
  params.validate();
  if (!(s >= 0.0) || !(s < t))
    throw std::invalid_argument("increment_kernel_integral: need 0 <= s < t");
  if (!(delta > 0.0)) throw std::invalid_argument("increment_kernel_integral: delta must be > 0");
  const double a = params.alpha;
  const double xi_max = params.cutoff_for(2.0 * (t - s));
  auto f = [&](double xi) {
    if (xi == 0.0) return 0.0;
    const double p = std::pow(xi, a);
    const double d = 1.0 - std::exp(-delta * p);
    return d * d * (std::exp(-2.0 * (t - s) * p) - std::exp(-2.0 * t * p)) / p;
  };
  KernelIntegralReport rep;
  rep.s = s;
  rep.t = t;
  rep.delta = delta;
  rep.value = quad::integrate(f, 0.0, xi_max, params.abs_tol) / (2.0 * kPi);
  rep.bound_constant = rep.value / (delta * delta * std::pow(t - s, -(a + 1.0) / a));
  return rep;
}

KernelPropertyReport kernel_property_check(const KernelParams& params, double t) {
  params.validate();
  if (!(t > 0.0)) throw std::invalid_argument("kernel_property_check: t must be positive");
  const double a = params.alpha;
  const double scale = std::pow(t, 1.0 / a);
  KernelPropertyReport rep;

  // normalization: interior mass on [-X, X] plus the analytic far tail,
  // with X pushed out until the tail model is accurate enough
  const double tol = std::max(params.abs_tol, 1e-9);
  double x_max = 10.0 * scale;
  TailMass tail = stable_tail_mass(a, t, x_max);
  while (tail.trunc > 0.02 * tol && x_max < 1e6) {
    x_max *= 2.0;
    tail = stable_tail_mass(a, t, x_max);
  }
  auto g = [&](double x) { return green_kernel_value(params, t, x); };
  const double interior = 2.0 * quad::integrate(g, 0.0, x_max, 100.0 * tol, x_max / 16.0);
  rep.normalization_error = std::abs(interior + tail.value - 1.0);

  // symmetry, scaling, sandwich envelope and positivity on one grid
  const double y_max = a >= 2.0 ? 6.0 : 10.0;
  rep.all_positive = true;
  double smin = std::numeric_limits<double>::infinity();
  double smax = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double y = y_max * i / 40.0;
    const double x = y * scale;
    const double v = g(x);
    if (!(v > 0.0)) rep.all_positive = false;
    rep.symmetry_error = std::max(rep.symmetry_error, std::abs(v - g(-x)));
    const double ref = green_kernel_value(params, 1.0, y) / scale;
    rep.scaling_error = std::max(rep.scaling_error, std::abs(v - ref));
    const double ratio = v * std::pow(1.0 + y, 1.0 + a) * scale;
    smin = std::min(smin, ratio);
    smax = std::max(smax, ratio);
  }
  rep.sandwich_min = smin;
  rep.sandwich_max = smax;
  return rep;
}

}  // namespace varheat::kernel
