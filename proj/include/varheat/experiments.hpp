#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "varheat/gaussian.hpp"
#include "varheat/sigma.hpp"

namespace varheat::experiments {

enum class RateTarget { fbm_vn, perturbed_vn, u0_vn, nonlinear_vn, nonlinear_un };
enum class EstimatorTarget { alpha_hat, theta1, theta2 };
enum class ErrorNorm { l1, l2 };

std::string to_string(RateTarget t);
std::string to_string(EstimatorTarget t);

struct RateSpec {
  std::string name;
  double theoretical_exponent = 0.0;  // < 0 for every convergence claim
  std::string source;                 // which limit theorem the rate belongs to
};

struct ExperimentParams {
  double hurst = 0.25;                         // fbm_vn
  gaussian::PerturbedFbmSpec perturbed{1.0, 0.25, 1.0};
  double alpha = 2.0;
  double theta = 1.0;
  SigmaSpec sigma = SigmaSpec::constant(1.0);
  ErrorNorm norm = ErrorNorm::l2;
  int factorization_cap = 8192;
  // solver sizing for the nonlinear targets; 0 = auto
  int n_space = 0;
  double half_length = 0.0;
};

struct McReport {
  RateSpec rate;
  std::vector<int> n_values;
  std::vector<double> errors;           // MC mean |err|, mean err^2, or median
  std::vector<double> standard_errors;
  double fitted_slope = 0.0;
  std::array<double, 2> slope_ci{0.0, 0.0};
  int replicates = 0;
  std::uint64_t seed = 0;
  std::string verdict;                  // consistent-with-rate | faster-than-bound | slower-than-bound
  bool decreasing_trend = false;        // errors fall after the smallest N (one inversion within 1 SE allowed)
};

// Workers capped by VARHEAT_THREADS (default: hardware concurrency).
int worker_count();

// For each N: draw replicates, form statistic minus (pathwise) limit, average
// |.| or (.)^2, regress log error on log N. Replicates are combined by index,
// so parallel and serial runs agree bit-for-bit.
McReport run_rate_experiment(RateTarget target, const ExperimentParams& params,
                             std::span<const int> n_grid, int replicates, std::uint64_t seed);

// Median absolute (alpha) or median relative (theta) estimator error per N.
McReport run_estimator_experiment(EstimatorTarget target, const ExperimentParams& params,
                                  std::span<const int> n_grid, int replicates,
                                  std::uint64_t seed);

}  // namespace varheat::experiments
