#pragma once

#include <optional>

#include "varheat/path.hpp"
#include "varheat/sigma.hpp"

namespace varheat::estimators {

struct EstimateResult {
  enum class Target { alpha, theta };
  enum class Method { log_ratio, quad, power };

  double estimate = 0.0;
  Target target = Target::alpha;
  Method method = Method::log_ratio;
  int grid_n = 0;
  double riemann_sum = 0.0;
  std::optional<double> a_n;         // log-ratio statistic (alpha target)
  std::optional<double> statistic;   // V_N or U_N (theta targets)
  std::optional<double> c0;
  std::optional<double> b0;
  std::optional<double> bias_hint;   // finite-N log-offset diagnostic for alpha
};

// alpha_hat = log(N) / log(A_N),
// A_N = sum (du)^2 / ((1/N) sum sigma^2(u(t_i, x))); needs neither theta nor
// the variation constants.
EstimateResult estimate_alpha(const Path& path, const SigmaSpec& sigma,
                              double denominator_floor = 1e-12);

// theta_hat_1 = (V_{N,x} / (c0^2 (1/N) sum sigma^2(u(t_i))))^-alpha
EstimateResult estimate_theta_quadratic(const Path& path, double alpha, const SigmaSpec& sigma,
                                        double c0);

// theta_hat_2 = (U_{N,x} / (b0 (1/N) sum sigma^(2a/(a-1))(u(t_i))))^-(alpha-1)
EstimateResult estimate_theta_power(const Path& path, double alpha, const SigmaSpec& sigma,
                                    double b0);

struct TheoreticalLimits {
  double v_limit = 0.0;
  std::optional<double> u_limit;  // absent when 2 alpha/(alpha-1) is not an even integer
  double c0 = 0.0;
  std::optional<double> b0;
};

// (C^2 theta^-1/alpha m2, B theta^-1/(alpha-1) m_p) with the constants taken
// from the internal derivation, never hard-coded.
TheoreticalLimits theoretical_limits(double alpha, double theta, double sigma_moment_2,
                                     double sigma_moment_p);

}  // namespace varheat::estimators
