#include "varheat/estimators.hpp"

#include <cmath>

#include "varheat/common.hpp"
#include "varheat/gaussian.hpp"
#include "varheat/variations.hpp"

namespace varheat::estimators {

EstimateResult estimate_alpha(const Path& path, const SigmaSpec& sigma,
                              double denominator_floor) {
  path.validate();
  if (path.grid_n < 4) throw std::invalid_argument("estimate_alpha: need N >= 4");
  const double quad_sum = variations::power_variation(path, 2.0).statistic;
  const double rs = variations::riemann_sigma_sum(path, sigma, 2.0);
  if (!(rs > denominator_floor))
    throw degenerate_input("estimate_alpha: Riemann sigma sum below floor");
  if (!(quad_sum > 0.0)) throw degenerate_input("estimate_alpha: path has zero variation");
  const double a_n = quad_sum / rs;
  if (!(a_n > 1.0))
    throw estimator_undefined("estimate_alpha: A_N = " + std::to_string(a_n) +
                              " <= 1 (N too small or degenerate path)");
  EstimateResult r;
  r.target = EstimateResult::Target::alpha;
  r.method = EstimateResult::Method::log_ratio;
  r.grid_n = path.grid_n;
  r.riemann_sum = rs;
  r.a_n = a_n;
  r.estimate = std::log(static_cast<double>(path.grid_n)) / std::log(a_n);
  // inherent finite-N offset scale: the bias is log(C^2 theta^-1/alpha)
  // times this factor; reported, not corrected
  r.bias_hint = 1.0 / std::log(static_cast<double>(path.grid_n));
  return r;
}

EstimateResult estimate_theta_quadratic(const Path& path, double alpha, const SigmaSpec& sigma,
                                        double c0) {
  path.validate();
  if (path.grid_n < 4) throw std::invalid_argument("estimate_theta_quadratic: need N >= 4");
  if (!(c0 > 0.0)) throw std::invalid_argument("estimate_theta_quadratic: c0 must be positive");
  const double v = variations::quad_variation_renorm(path, alpha).statistic;
  const double rs = variations::riemann_sigma_sum(path, sigma, 2.0);
  if (!(rs > 1e-12)) throw degenerate_input("estimate_theta_quadratic: vanishing Riemann sum");
  if (!(v > 0.0)) throw degenerate_input("estimate_theta_quadratic: vanishing statistic");
  EstimateResult r;
  r.target = EstimateResult::Target::theta;
  r.method = EstimateResult::Method::quad;
  r.grid_n = path.grid_n;
  r.riemann_sum = rs;
  r.statistic = v;
  r.c0 = c0;
  r.estimate = std::pow(v / (c0 * c0 * rs), -alpha);
  return r;
}

EstimateResult estimate_theta_power(const Path& path, double alpha, const SigmaSpec& sigma,
                                    double b0) {
  path.validate();
  if (path.grid_n < 4) throw std::invalid_argument("estimate_theta_power: need N >= 4");
  if (!(b0 > 0.0)) throw std::invalid_argument("estimate_theta_power: b0 must be positive");
  const double p = gaussian::variation_order(alpha);
  const double rounded = std::round(p);
  if (std::abs(p - rounded) > 1e-9 || static_cast<long>(rounded) % 2 != 0)
    throw std::invalid_argument("estimate_theta_power: 2 alpha/(alpha-1) = " + std::to_string(p) +
                                " is not an even integer");
  const double u = variations::power_variation(path, p).statistic;
  const double rs = variations::riemann_sigma_sum(path, sigma, p);
  if (!(rs > 1e-12)) throw degenerate_input("estimate_theta_power: vanishing Riemann sum");
  if (!(u > 0.0)) throw degenerate_input("estimate_theta_power: vanishing statistic");
  EstimateResult r;
  r.target = EstimateResult::Target::theta;
  r.method = EstimateResult::Method::power;
  r.grid_n = path.grid_n;
  r.riemann_sum = rs;
  r.statistic = u;
  r.b0 = b0;
  r.estimate = std::pow(u / (b0 * rs), -(alpha - 1.0));
  return r;
}

TheoreticalLimits theoretical_limits(double alpha, double theta, double sigma_moment_2,
                                     double sigma_moment_p) {
  if (!(theta > 0.0)) throw std::invalid_argument("theoretical_limits: theta must be positive");
  if (sigma_moment_2 < 0.0 || sigma_moment_p < 0.0)
    throw std::invalid_argument("theoretical_limits: moments must be >= 0");
  kernel::KernelParams params;
  params.alpha = alpha;
  TheoreticalLimits lim;
  lim.c0 = gaussian::c0_alpha(params);
  lim.v_limit = lim.c0 * lim.c0 * std::pow(theta, -1.0 / alpha) * sigma_moment_2;
  const double p = gaussian::variation_order(alpha);
  if (std::abs(p - std::round(p)) <= 1e-9 && static_cast<long>(std::round(p)) % 2 == 0) {
    lim.b0 = gaussian::b0_alpha(params);
    lim.u_limit = *lim.b0 * std::pow(theta, -1.0 / (alpha - 1.0)) * sigma_moment_p;
  }
  return lim;
}

}  // namespace varheat::estimators
