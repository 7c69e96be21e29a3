#pragma once

#include <span>

#include "varheat/path.hpp"
#include "varheat/sigma.hpp"

namespace varheat::variations {

struct VariationResult {
  enum class Kind { quad_renorm, power_p, fbm_norm };
  double statistic = 0.0;
  Kind kind = Kind::quad_renorm;
  int grid_n = 0;
  double normalization_exponent = 0.0;  // exponent of N in the prefactor
  double p = 0.0;                       // order when kind == power_p
  double param = 0.0;                   // alpha (quad) or hurst (fbm_norm)
};

// V_{N,x}(u) = N^{-1/alpha} sum (u(t_{i+1}) - u(t_i))^2
VariationResult quad_variation_renorm(const Path& path, double alpha);

// U_{N,x}(u) = sum |u(t_{i+1}) - u(t_i)|^p, no normalization
VariationResult power_variation(const Path& path, double p);

// V_N(B^H) = N^{2H-1} sum (dB)^2
VariationResult fbm_normalized_variation(const Path& path, double hurst);

// (1/N) sum_{i=1}^{N} sigma(u(t_i, x))^q
double riemann_sigma_sum(const Path& path, const SigmaSpec& sigma, double q);

// the unique alpha in (1, 2] with 2 alpha / (alpha - 1) = p, for even p >= 4
double admissible_alpha(int p);

// trapezoid of sigma(u)^q over [0, t_end] on a fine uniformly-sampled path;
// the pathwise oracle for the variation limits
double pathwise_sigma_integral(std::span<const double> fine_values, double fine_dt,
                               const SigmaSpec& sigma, double q, double t_end = 1.0);

}  // namespace varheat::variations
