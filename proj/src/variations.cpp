#include "varheat/variations.hpp"

#include <cmath>

#include "varheat/common.hpp"

namespace varheat::variations {

namespace {

void check_path(const Path& path) {
  path.validate();
  if (path.grid_n < 2) throw std::invalid_argument("variation: grid_n must be >= 2");
}

}  // namespace

VariationResult quad_variation_renorm(const Path& path, double alpha) {
  check_path(path);
  if (!(alpha > 1.0) || !(alpha <= 2.0))
    throw std::invalid_argument("quad_variation_renorm: alpha must lie in (1, 2]");
  CompensatedSum s;
  for (int i = 0; i < path.grid_n; ++i) {
    const double d = path.values[i + 1] - path.values[i];
    s.add(d * d);
  }
  VariationResult r;
  r.kind = VariationResult::Kind::quad_renorm;
  r.grid_n = path.grid_n;
  r.normalization_exponent = -1.0 / alpha;
  r.param = alpha;
  r.statistic = std::pow(static_cast<double>(path.grid_n), -1.0 / alpha) * s.value();
  return r;
}

VariationResult power_variation(const Path& path, double p) {
  check_path(path);
  if (!(p > 0.0)) throw std::invalid_argument("power_variation: p must be positive");
  CompensatedSum s;
  for (int i = 0; i < path.grid_n; ++i)
    s.add(std::pow(std::abs(path.values[i + 1] - path.values[i]), p));
  VariationResult r;
  r.kind = VariationResult::Kind::power_p;
  r.grid_n = path.grid_n;
  r.normalization_exponent = 0.0;
  r.p = p;
  r.statistic = s.value();
  return r;
}

VariationResult fbm_normalized_variation(const Path& path, double hurst) {
  check_path(path);
  if (!(hurst > 0.0) || !(hurst < 1.0))
    throw std::invalid_argument("fbm_normalized_variation: hurst must lie in (0, 1)");
  CompensatedSum s;
  for (int i = 0; i < path.grid_n; ++i) {
    const double d = path.values[i + 1] - path.values[i];
    s.add(d * d);
  }
  VariationResult r;
  r.kind = VariationResult::Kind::fbm_norm;
  r.grid_n = path.grid_n;
  r.normalization_exponent = 2.0 * hurst - 1.0;
  r.param = hurst;
  r.statistic = std::pow(static_cast<double>(path.grid_n), 2.0 * hurst - 1.0) * s.value();
  return r;
}

double riemann_sigma_sum(const Path& path, const SigmaSpec& sigma, double q) {
  path.validate();
  if (path.grid_n < 1) throw std::invalid_argument("riemann_sigma_sum: grid_n must be >= 1");
  if (!(q > 0.0)) throw std::invalid_argument("riemann_sigma_sum: q must be positive");
  CompensatedSum s;
  for (int i = 1; i <= path.grid_n; ++i) s.add(std::pow(sigma(path.values[i]), q));
  return s.value() / path.grid_n;
}

double admissible_alpha(int p) {
  if (p < 4 || p % 2 != 0)
    throw std::invalid_argument("admissible_alpha: p must be an even integer >= 4");
  return static_cast<double>(p) / (p - 2);
}

double pathwise_sigma_integral(std::span<const double> fine_values, double fine_dt,
                               const SigmaSpec& sigma, double q, double t_end) {
  if (!(fine_dt > 0.0)) throw std::invalid_argument("pathwise_sigma_integral: fine_dt must be > 0");
  const auto last = static_cast<std::size_t>(std::llround(t_end / fine_dt));
  if (last < 1 || last >= fine_values.size())
    throw std::invalid_argument("pathwise_sigma_integral: t_end outside the sampled horizon");
  CompensatedSum s;
  for (std::size_t k = 0; k <= last; ++k) {
    const double v = std::pow(sigma(fine_values[k]), q);
    s.add((k == 0 || k == last) ? 0.5 * v : v);
  }
  return s.value() * fine_dt;
}

}  // namespace varheat::variations
