#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "varheat/common.hpp"
#include "varheat/path.hpp"
#include "varheat/sigma.hpp"

namespace varheat::spde {

// Full simulation recipe for the nonlinear equation: exponential-Euler
// pseudo-spectral scheme on the periodized domain [0, 2L), observed at a
// fixed spatial point on the grid t_i = i/N.
struct SimConfig {
  double alpha = 2.0;
  double theta = 1.0;
  SigmaSpec sigma = SigmaSpec::constant(1.0);
  int observe_n = 0;       // N of the observation grid on [0, 1]
  int n_time = 0;          // fine steps over the simulated horizon; 0 = auto (16 N)
  int n_space = 0;         // spatial cells, power of two >= 256; 0 = auto
  double half_length = 0;  // L of the domain [0, 2L); 0 = auto (>= 5 T^(1/alpha))
  double observe_x = -1;   // observation point; -1 = L (domain center)
  std::uint64_t seed = 0;
  double t_horizon = 1.0;  // horizon of the observed process; >= 1
  std::vector<double> snapshot_times;
  // true: noise carries its exact per-step stochastic-convolution variance
  // per mode (for sigma == 1 every mode is then an exactly-sampled OU
  // process). false: plain end-of-step damping, kept for comparison; its
  // increment variance is low by order sqrt(dt / observation lag).
  bool noise_variance_exact = true;

  void validate_basic() const;
};

// Grid quantities after auto-fields are resolved; also the handle tests use
// to reason about the discrete scheme.
struct ResolvedGrid {
  double alpha = 2.0;
  double theta_eff = 1.0;  // drift multiplier inside the semigroup
  SigmaSpec sigma_eff;
  double t_sim = 1.0;      // simulation-clock horizon
  int n_time = 0;
  int n_space = 0;
  int obs_index = 0;
  int obs_stride = 0;      // fine steps between observation nodes (0 when unused)
  double dt = 0.0;         // simulation-clock step
  double dx = 0.0;
  double half_length = 0.0;
  double noise_scale = 0.0;   // sqrt(dt / dx)
  double clock_ratio = 1.0;   // observed-process time per simulation time
  std::vector<double> lambda; // theta_eff |xi_m|^alpha, m = 0 .. n_space/2
};

ResolvedGrid resolve_grid(const SimConfig& config, bool parametrized,
                          bool need_observation_grid = true);

struct FieldSnapshot {
  double time;  // observed-process clock
  std::vector<double> values;
};

struct SolveResult {
  Path path;                         // u at t_i = i/N, i = 0..N
  std::vector<double> fine_observed; // u(k * fine_dt, x_obs), k = 0..n_time
  double fine_dt = 0.0;              // observed-process clock step
  std::vector<FieldSnapshot> snapshots;
};

// Direct simulation of the parametrized equation: the semigroup factor is
// exp(-theta |xi|^alpha dt) per step, noise has independent cell increments
// of variance dt * dx.
SolveResult solve_nonlinear(const SimConfig& config, std::uint64_t replicate = 0);

// Transform route: simulate v with drift 1 and diffusion theta^-1/2 sigma on
// [0, theta T], read u(t) = v(theta t). Law-equivalent to solve_nonlinear.
SolveResult solve_parametrized(const SimConfig& config, std::uint64_t replicate = 0);

struct CoupledIncrementSample {
  double real_increment = 0.0;   // u(t+delta, x) - u(t, x)
  double surrogate = 0.0;        // sigma(u(t(delta), x)) * linear_increment
  double linear_increment = 0.0; // coupled linear increment of u0
  double delta = 0.0;
  double t_delta = 0.0;          // t - delta^beta snapped to the fine grid
};

// One noise realization drives both the nonlinear increment and the linear
// surrogate; the surrogate's noise before t(delta) comes from an independent
// copy unless use_independent_copy is false (test hook).
CoupledIncrementSample coupled_increment(const SimConfig& config, double t, double delta,
                                         std::uint64_t replicate,
                                         bool use_independent_copy = true);

// All rungs of a delta ladder on a single realization.
std::vector<CoupledIncrementSample> coupled_increment_ladder(const SimConfig& config, double t,
                                                             std::span<const double> deltas,
                                                             std::uint64_t replicate,
                                                             bool use_independent_copy = true);

double coupling_beta(double alpha);  // 2 alpha / (2 alpha + 1)

struct HolderReport {
  double exponent = 0.0;  // fitted variogram slope / 2
  double theory = 0.0;    // (alpha - 1) / (2 alpha)
};

// Empirical temporal Hoelder exponent from dyadic-lag mean-square increments.
HolderReport holder_diagnostics(const Path& path, double alpha);

}  // namespace varheat::spde
