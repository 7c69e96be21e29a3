#include "varheat/spde.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>

#include "varheat/fft.hpp"
#include "varheat/rng.hpp"

namespace varheat::spde {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kTildeDrawOffset = 1ULL << 62;  // stream block for the noise copy

bool is_pow2(int m) { return m > 0 && (m & (m - 1)) == 0; }

int pow2_floor(double x) {
  int m = 1;
  while (2.0 * m <= x) m *= 2;
  return m;
}

}  // namespace

double coupling_beta(double alpha) { return 2.0 * alpha / (2.0 * alpha + 1.0); }

void SimConfig::validate_basic() const {
  if (!(alpha > 1.0) || !(alpha <= 2.0))
    throw std::invalid_argument("SimConfig: alpha must lie in (1, 2]");
  if (!(theta > 0.0)) throw std::invalid_argument("SimConfig: theta must be positive");
  if (observe_n < 2) throw std::invalid_argument("SimConfig: observe_n must be >= 2");
  if (!(t_horizon >= 1.0)) throw std::invalid_argument("SimConfig: t_horizon must be >= 1");
}

ResolvedGrid resolve_grid(const SimConfig& config, bool parametrized, bool need_observation_grid) {
  config.validate_basic();
  ResolvedGrid g;
  g.alpha = config.alpha;
  g.theta_eff = parametrized ? 1.0 : config.theta;
  g.sigma_eff = parametrized ? config.sigma.scaled(1.0 / std::sqrt(config.theta)) : config.sigma;
  g.clock_ratio = parametrized ? 1.0 / config.theta : 1.0;
  g.t_sim = parametrized ? config.theta * config.t_horizon : config.t_horizon;

  // observation times i/N must land exactly on fine nodes
  const double steps_per_unit = config.observe_n * config.t_horizon;
  const long spu = std::lround(steps_per_unit);
  if (std::abs(steps_per_unit - spu) > 1e-9)
    throw std::invalid_argument("SimConfig: observe_n * t_horizon must be an integer");

  g.n_time = config.n_time > 0 ? config.n_time : static_cast<int>(16 * spu);
  if (need_observation_grid) {
    if (g.n_time % spu != 0)
      throw std::invalid_argument("SimConfig: n_time must be a multiple of observe_n * t_horizon");
    g.obs_stride = static_cast<int>(g.n_time / spu);
    if (g.obs_stride < 16)
      throw std::invalid_argument("SimConfig: fine grid must refine the observation grid >= 16x");
  }
  g.dt = g.t_sim / g.n_time;

  g.half_length = config.half_length > 0.0
                      ? config.half_length
                      : std::ceil(5.0 * std::pow(g.t_sim, 1.0 / g.alpha));
  if (g.half_length < 5.0 * std::pow(g.t_sim, 1.0 / g.alpha) - 1e-12)
    throw std::invalid_argument("SimConfig: half_length below 5 * t_sim^(1/alpha)");

  if (config.n_space > 0) {
    g.n_space = config.n_space;
  } else {
    const double bound = 2.0 * g.half_length / std::pow(g.dt, 1.0 / g.alpha);
    g.n_space = std::clamp(pow2_floor(bound), 256, 2048);
  }
  if (!is_pow2(g.n_space) || g.n_space < 256)
    throw std::invalid_argument("SimConfig: n_space must be a power of two >= 256");
  g.dx = 2.0 * g.half_length / g.n_space;
  if (g.dt > std::pow(g.dx, g.alpha) * (1.0 + 1e-12))
    throw std::invalid_argument("SimConfig: resolution balance dt <= dx^alpha violated");

  const double obs_x = config.observe_x < 0.0 ? g.half_length : config.observe_x;
  const double idx = obs_x / g.dx;
  g.obs_index = static_cast<int>(std::lround(idx));
  if (g.obs_index < 0 || g.obs_index >= g.n_space || std::abs(idx - g.obs_index) > 1e-9)
    throw std::invalid_argument("SimConfig: observe_x must be a grid node inside [0, 2L)");

  g.noise_scale = std::sqrt(g.dt / g.dx);
  g.lambda.resize(g.n_space / 2 + 1);
  for (int m = 0; m <= g.n_space / 2; ++m) {
    const double xi = kPi * m / g.half_length;
    g.lambda[m] = g.theta_eff * std::pow(xi, g.alpha);
  }
  return g;
}

namespace {

// Hermitian half-spectrum evaluated at one grid node, divided by M.
double point_from_spectrum(const std::complex<double>* c, int m_half, int n, int j) {
  const double angle0 = 2.0 * kPi * j / n;
  double acc = c[0].real();
  for (int m = 1; m < m_half; ++m) {
    const double a = angle0 * m;
    acc += 2.0 * (c[m].real() * std::cos(a) - c[m].imag() * std::sin(a));
  }
  acc += c[m_half].real() * ((j % 2 == 0) ? 1.0 : -1.0);
  return acc / n;
}

// exp(-lambda dt) per mode, and the noise gain: phi = sqrt((1 - e^{-2 lambda
// dt}) / (2 lambda dt)) when the exact per-step convolution variance is
// requested, otherwise the plain end-of-step damping e^{-lambda dt}.
struct StepFilters {
  std::vector<double> decay;
  std::vector<double> gain;
};

StepFilters make_filters(const ResolvedGrid& g, bool variance_exact) {
  StepFilters f;
  const int mh = g.n_space / 2;
  f.decay.resize(mh + 1);
  f.gain.resize(mh + 1);
  for (int k = 0; k <= mh; ++k) {
    const double z = g.lambda[k] * g.dt;
    f.decay[k] = std::exp(-z);
    if (!variance_exact) {
      f.gain[k] = f.decay[k];
    } else {
      f.gain[k] = z < 1e-8 ? 1.0 - 0.5 * z : std::sqrt(-std::expm1(-2.0 * z) / (2.0 * z));
    }
  }
  return f;
}

SolveResult run_solver(const SimConfig& config, const ResolvedGrid& g, std::uint64_t replicate) {
  const int m = g.n_space;
  const int mh = m / 2;
  RealFft fft(m);
  const StepFilters filt = make_filters(g, config.noise_variance_exact);
  std::vector<std::complex<double>> state(mh + 1, 0.0);  // spectral state
  std::vector<double> u(m, 0.0);                         // physical state, same time point

  CounterRng rng(config.seed);

  SolveResult out;
  out.fine_dt = g.dt * g.clock_ratio;
  out.fine_observed.assign(g.n_time + 1, 0.0);

  // snapshot bookkeeping (times are on the observed-process clock)
  std::vector<std::pair<int, double>> snap_steps;
  for (double ts : config.snapshot_times) {
    const double sim_t = ts / g.clock_ratio;
    const int k = static_cast<int>(std::lround(sim_t / g.dt));
    if (k < 0 || k > g.n_time)
      throw std::invalid_argument("SimConfig: snapshot time outside the simulated horizon");
    snap_steps.emplace_back(k, ts);
  }
  auto maybe_snapshot = [&](int step) {
    for (const auto& [k, ts] : snap_steps)
      if (k == step) out.snapshots.push_back({ts, u});
  };
  maybe_snapshot(0);

  double* w = fft.real_buffer();
  auto* spec = fft.complex_buffer();
  const double inv_m = 1.0 / m;
  for (int step = 0; step < g.n_time; ++step) {
    const std::uint64_t base = static_cast<std::uint64_t>(step) * m;
    for (int j = 0; j < m; ++j) {
      const double gjk = rng.normal(replicate, base + j) * g.noise_scale;
      w[j] = g.sigma_eff(u[j]) * gjk;
    }
    fft.forward();
    for (int k = 0; k <= mh; ++k) state[k] = filt.decay[k] * state[k] + filt.gain[k] * spec[k];
    std::copy(state.begin(), state.end(), spec);
    fft.inverse();
    for (int j = 0; j < m; ++j) u[j] = w[j] * inv_m;
    const double obs = u[g.obs_index];
    if (!std::isfinite(obs))
      throw numerical_error("solver produced a non-finite value at step " +
                            std::to_string(step + 1));
    out.fine_observed[step + 1] = obs;
    maybe_snapshot(step + 1);
  }

  const int n = config.observe_n;
  out.path.grid_n = n;
  out.path.values.assign(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) out.path.values[i] = out.fine_observed[i * g.obs_stride];
  out.path.meta = PathKind::spde_numeric;
  out.path.param = config.alpha;
  out.path.theta = config.theta;
  out.path.seed = config.seed;
  out.path.sigma_label = config.sigma.label();
  out.path.spatial_point = g.obs_index * g.dx;
  return out;
}

}  // namespace

SolveResult solve_nonlinear(const SimConfig& config, std::uint64_t replicate) {
  const ResolvedGrid g = resolve_grid(config, /*parametrized=*/false);
  return run_solver(config, g, replicate);
}

SolveResult solve_parametrized(const SimConfig& config, std::uint64_t replicate) {
  const ResolvedGrid g = resolve_grid(config, /*parametrized=*/true);
  return run_solver(config, g, replicate);
}

std::vector<CoupledIncrementSample> coupled_increment_ladder(const SimConfig& config, double t,
                                                             std::span<const double> deltas,
                                                             std::uint64_t replicate,
                                                             bool use_independent_copy) {
  const ResolvedGrid g = resolve_grid(config, /*parametrized=*/false,
                                      /*need_observation_grid=*/false);
  if (deltas.empty()) throw std::invalid_argument("coupled_increment: empty delta ladder");
  const double beta = coupling_beta(config.alpha);

  struct Rung {
    double delta;
    int step_t, step_td, step_te;  // fine indices of t, t(delta), t + delta
  };
  std::vector<Rung> rungs;
  const int step_t = static_cast<int>(std::lround(t / g.dt));
  if (std::abs(step_t * g.dt - t) > 1e-9)
    throw std::invalid_argument("coupled_increment: t must land on the fine grid");
  int last_step = 0;
  for (double d : deltas) {
    if (!(d > 0.0)) throw std::invalid_argument("coupled_increment: delta must be positive");
    if (std::pow(d, beta) >= t)
      throw std::invalid_argument("coupled_increment: delta^beta must be smaller than t");
    if (t + d > config.t_horizon + 1e-12)
      throw std::invalid_argument("coupled_increment: t + delta exceeds t_horizon");
    Rung r;
    r.delta = d;
    r.step_t = step_t;
    r.step_td = static_cast<int>(std::floor((t - std::pow(d, beta)) / g.dt + 1e-12));
    const double e = (t + d) / g.dt;
    r.step_te = static_cast<int>(std::lround(e));
    if (std::abs(r.step_te - e) > 1e-9)
      throw std::invalid_argument("coupled_increment: t + delta must land on the fine grid");
    last_step = std::max(last_step, r.step_te);
    rungs.push_back(r);
  }

  const int m = g.n_space;
  const int mh = m / 2;
  RealFft fft(m);        // nonlinear state
  RealFft fft_noise(m);  // raw W and W-tilde spectra
  const StepFilters filt = make_filters(g, config.noise_variance_exact);

  std::vector<std::complex<double>> state(mh + 1, 0.0);
  std::vector<double> u(m, 0.0);
  std::vector<double> raw(m);
  // one spectral accumulator per rung: linear solution driven by the mixed noise
  std::vector<std::vector<std::complex<double>>> acc(rungs.size(),
                                                     std::vector<std::complex<double>>(mh + 1));
  std::vector<CoupledIncrementSample> out(rungs.size());
  std::vector<double> v_at_t(rungs.size(), 0.0), v_at_te(rungs.size(), 0.0);
  std::vector<double> u_at_t(rungs.size(), 0.0), u_at_te(rungs.size(), 0.0);
  std::vector<double> sigma_at_td(rungs.size(), 0.0);
  int max_td = 0;
  for (const auto& r : rungs) max_td = std::max(max_td, r.step_td);

  CounterRng rng(config.seed);
  double* w = fft.real_buffer();
  auto* spec = fft.complex_buffer();
  double* nw = fft_noise.real_buffer();
  auto* nspec = fft_noise.complex_buffer();

  auto record_reads = [&](int step_done) {
    for (std::size_t q = 0; q < rungs.size(); ++q) {
      if (rungs[q].step_td == step_done)
        sigma_at_td[q] = g.sigma_eff(u[g.obs_index]);
      if (rungs[q].step_t == step_done) {
        u_at_t[q] = u[g.obs_index];
        v_at_t[q] = point_from_spectrum(acc[q].data(), mh, m, g.obs_index);
      }
      if (rungs[q].step_te == step_done) {
        u_at_te[q] = u[g.obs_index];
        v_at_te[q] = point_from_spectrum(acc[q].data(), mh, m, g.obs_index);
      }
    }
  };
  record_reads(0);

  const double inv_m = 1.0 / m;
  for (int step = 0; step < last_step; ++step) {
    const std::uint64_t base = static_cast<std::uint64_t>(step) * m;
    for (int j = 0; j < m; ++j) raw[j] = rng.normal(replicate, base + j) * g.noise_scale;

    // nonlinear state update
    for (int j = 0; j < m; ++j) w[j] = g.sigma_eff(u[j]) * raw[j];
    fft.forward();
    for (int k = 0; k <= mh; ++k) state[k] = filt.decay[k] * state[k] + filt.gain[k] * spec[k];
    std::copy(state.begin(), state.end(), spec);
    fft.inverse();
    for (int j = 0; j < m; ++j) u[j] = w[j] * inv_m;
    if (!std::isfinite(u[g.obs_index]))
      throw numerical_error("coupled_increment: non-finite field at step " +
                            std::to_string(step + 1));

    // spectra of the raw noises feeding the linear accumulators
    std::memcpy(nw, raw.data(), sizeof(double) * m);
    fft_noise.forward();
    std::vector<std::complex<double>> what(nspec, nspec + mh + 1);
    const bool any_pre = use_independent_copy && step < max_td;
    std::vector<std::complex<double>> what_tilde;
    if (any_pre) {
      for (int j = 0; j < m; ++j)
        nw[j] = rng.normal(replicate, kTildeDrawOffset + base + j) * g.noise_scale;
      fft_noise.forward();
      what_tilde.assign(nspec, nspec + mh + 1);
    }

    for (std::size_t q = 0; q < rungs.size(); ++q) {
      const bool pre = use_independent_copy && step < rungs[q].step_td;
      const auto& eta = pre ? what_tilde : what;
      auto& a = acc[q];
      for (int k = 0; k <= mh; ++k) a[k] = filt.decay[k] * a[k] + filt.gain[k] * eta[k];
    }
    record_reads(step + 1);
  }

  for (std::size_t q = 0; q < rungs.size(); ++q) {
    out[q].delta = rungs[q].delta;
    out[q].t_delta = rungs[q].step_td * g.dt;
    out[q].linear_increment = v_at_te[q] - v_at_t[q];
    out[q].surrogate = sigma_at_td[q] * out[q].linear_increment;
    out[q].real_increment = u_at_te[q] - u_at_t[q];
  }
  return out;
}

CoupledIncrementSample coupled_increment(const SimConfig& config, double t, double delta,
                                         std::uint64_t replicate, bool use_independent_copy) {
  const double d[1] = {delta};
  return coupled_increment_ladder(config, t, d, replicate, use_independent_copy)[0];
}

HolderReport holder_diagnostics(const Path& path, double alpha) {
  path.validate();
  if (path.grid_n < 256)
    throw std::invalid_argument("holder_diagnostics: need grid_n >= 256");
  const int n = path.grid_n;
  std::vector<double> logs_d, logs_m;
  for (int lag = 1; lag <= n / 16; lag *= 2) {
    CompensatedSum s;
    for (int i = 0; i + lag <= n; ++i) {
      const double d = path.values[i + lag] - path.values[i];
      s.add(d * d);
    }
    const double msq = s.value() / (n - lag + 1);
    if (!(msq > 0.0))
      throw numerical_error("holder_diagnostics: degenerate path (zero variation at lag " +
                            std::to_string(lag) + ")");
    logs_d.push_back(std::log(static_cast<double>(lag) / n));
    logs_m.push_back(std::log(msq));
  }
  HolderReport rep;
  rep.exponent = fit_line(logs_d, logs_m).slope / 2.0;
  rep.theory = (alpha - 1.0) / (2.0 * alpha);
  return rep;
}

}  // namespace varheat::spde
