#include "varheat/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "varheat/estimators.hpp"
#include "varheat/spde.hpp"
#include "varheat/variations.hpp"

namespace varheat::experiments {

std::string to_string(RateTarget t) {
  switch (t) {
    case RateTarget::fbm_vn: return "fbm_vn";
    case RateTarget::perturbed_vn: return "perturbed_vn";
    case RateTarget::u0_vn: return "u0_vn";
    case RateTarget::nonlinear_vn: return "nonlinear_vn";
    case RateTarget::nonlinear_un: return "nonlinear_un";
  }
  return "?";
}

std::string to_string(EstimatorTarget t) {
  switch (t) {
    case EstimatorTarget::alpha_hat: return "alpha_hat";
    case EstimatorTarget::theta1: return "theta1";
    case EstimatorTarget::theta2: return "theta2";
  }
  return "?";
}

int worker_count() {
  if (const char* env = std::getenv("VARHEAT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 256);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

template <typename Fn>
void parallel_replicates(int replicates, Fn&& fn) {
  const int workers = std::min(worker_count(), replicates);
  if (workers <= 1) {
    for (int r = 0; r < replicates; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int r = next.fetch_add(1);
        if (r >= replicates) return;
        {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (first_error) return;
        }
        try {
          fn(r);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void validate_grid(std::span<const int> n_grid, int replicates, int min_points) {
  if (static_cast<int>(n_grid.size()) < min_points)
    throw std::invalid_argument("experiment: n_grid needs >= " + std::to_string(min_points) +
                                " points");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const int n = n_grid[i];
    if (n < 2 || (n & (n - 1)) != 0)
      throw std::invalid_argument("experiment: n_grid entries must be dyadic");
    if (i > 0 && n <= n_grid[i - 1])
      throw std::invalid_argument("experiment: n_grid must be strictly increasing");
  }
  if (replicates < 100) throw std::invalid_argument("experiment: replicates must be >= 100");
}

double mean_of(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value() / xs.size();
}

double sd_of(std::span<const double> xs, double mean) {
  CompensatedSum s;
  for (double x : xs) s.add((x - mean) * (x - mean));
  return std::sqrt(s.value() / (xs.size() - 1));
}

double median_of(std::vector<double> xs) {
  const std::size_t n = xs.size();
  std::nth_element(xs.begin(), xs.begin() + n / 2, xs.end());
  double hi = xs[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(xs.begin(), xs.begin() + n / 2 - 1, xs.begin() + n / 2);
  return 0.5 * (xs[n / 2 - 1] + hi);
}

// slope of log(error) on log(N) for one aggregation of the error matrix
template <typename Agg>
double slope_for(const std::vector<int>& ns, const std::vector<std::vector<double>>& raw,
                 const Agg& agg, std::span<const std::size_t> pick) {
  std::vector<double> lx, ly;
  std::vector<double> rep_vals;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    rep_vals.clear();
    if (pick.empty()) {
      rep_vals = raw[i];
    } else {
      rep_vals.reserve(pick.size());
      for (std::size_t r : pick) rep_vals.push_back(raw[i][r]);
    }
    const double e = agg(rep_vals);
    if (!(e > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    lx.push_back(std::log(static_cast<double>(ns[i])));
    ly.push_back(std::log(e));
  }
  return fit_line(lx, ly).slope;
}

// raw[i][r]: replicate-level error at n_values[i]; shared replicate indices
// resampled jointly across N so coupled designs bootstrap correctly.
template <typename Agg>
McReport assemble_report(RateSpec rate, const std::vector<int>& ns,
                         const std::vector<std::vector<double>>& raw, int replicates,
                         std::uint64_t seed, const Agg& agg, bool analytic_se) {
  McReport rep;
  rep.rate = std::move(rate);
  rep.n_values = ns;
  rep.replicates = replicates;
  rep.seed = seed;

  CounterRng boot_rng(seed ^ 0x626f6f74ULL);
  constexpr int kBoot = 200;

  for (std::size_t i = 0; i < ns.size(); ++i) {
    rep.errors.push_back(agg(raw[i]));
    if (analytic_se) {
      rep.standard_errors.push_back(sd_of(raw[i], rep.errors.back()) /
                                    std::sqrt(static_cast<double>(replicates)));
    } else {
      // bootstrap spread of the aggregate
      std::vector<double> vals;
      std::vector<double> sample(replicates);
      for (int b = 0; b < kBoot; ++b) {
        for (int r = 0; r < replicates; ++r) {
          const auto pick = static_cast<std::size_t>(boot_rng.uniform01(1000 + b, r) * replicates);
          sample[r] = raw[i][std::min(pick, static_cast<std::size_t>(replicates - 1))];
        }
        vals.push_back(agg(sample));
      }
      const double m = mean_of(vals);
      rep.standard_errors.push_back(sd_of(vals, m));
    }
  }

  if (ns.size() >= 2) {
    rep.fitted_slope = slope_for(ns, raw, agg, {});
    std::vector<double> slopes;
    std::vector<std::size_t> pick(replicates);
    for (int b = 0; b < kBoot; ++b) {
      for (int r = 0; r < replicates; ++r) {
        const auto idx = static_cast<std::size_t>(boot_rng.uniform01(b, r) * replicates);
        pick[r] = std::min(idx, static_cast<std::size_t>(replicates - 1));
      }
      const double s = slope_for(ns, raw, agg, pick);
      if (std::isfinite(s)) slopes.push_back(s);
    }
    std::sort(slopes.begin(), slopes.end());
    if (slopes.size() >= 40) {
      rep.slope_ci = {slopes[static_cast<std::size_t>(0.025 * slopes.size())],
                      slopes[static_cast<std::size_t>(0.975 * slopes.size())]};
    } else {
      rep.slope_ci = {rep.fitted_slope, rep.fitted_slope};
    }
  } else {
    rep.slope_ci = {0.0, 0.0};
  }

  const double theory = rep.rate.theoretical_exponent;
  if (ns.size() < 2)
    rep.verdict = "single-size-run";
  else if (rep.fitted_slope < theory - 0.2)
    rep.verdict = "faster-than-bound";
  else if (rep.fitted_slope <= theory + 0.2)
    rep.verdict = "consistent-with-rate";
  else
    rep.verdict = "slower-than-bound";

  // decreasing after the smallest N, allowing one inversion within 1 SE
  int inversions = 0;
  bool bad = false;
  for (std::size_t i = 1; i + 1 < rep.errors.size(); ++i) {
    if (rep.errors[i + 1] > rep.errors[i]) {
      ++inversions;
      const double slack = std::hypot(rep.standard_errors[i], rep.standard_errors[i + 1]);
      if (rep.errors[i + 1] > rep.errors[i] + slack) bad = true;
    }
  }
  rep.decreasing_trend = !bad && inversions <= 1;
  return rep;
}

struct NonlinearLimits {
  double v_limit = 0.0;
  double u_limit = 0.0;
};

}  // namespace

McReport run_rate_experiment(RateTarget target, const ExperimentParams& params,
                             std::span<const int> n_grid, int replicates, std::uint64_t seed) {
  validate_grid(n_grid, replicates, 4);
  const std::vector<int> ns(n_grid.begin(), n_grid.end());
  std::vector<std::vector<double>> raw(ns.size(), std::vector<double>(replicates, 0.0));
  const bool l2 = params.norm == ErrorNorm::l2;
  auto push = [&](std::size_t i, int r, double signed_err) {
    raw[i][r] = l2 ? signed_err * signed_err : std::abs(signed_err);
  };

  RateSpec rate;
  rate.name = to_string(target);

  switch (target) {
    case RateTarget::fbm_vn: {
      rate.theoretical_exponent = l2 ? -1.0 : -0.5;
      rate.source = "quadratic variation of fBm";
      for (std::size_t i = 0; i < ns.size(); ++i) {
        gaussian::FbmSampler sampler(params.hurst, ns[i]);
        parallel_replicates(replicates, [&](int r) {
          const Path p = sampler.sample(seed, r);
          push(i, r, variations::fbm_normalized_variation(p, params.hurst).statistic - 1.0);
        });
      }
      break;
    }
    case RateTarget::perturbed_vn: {
      const double h = params.perturbed.hurst;
      double ex = h < 0.5 ? -1.0 : (h == 0.5 ? -1.0 : 2.0 * h - 2.0);
      rate.theoretical_exponent = l2 ? ex : 0.5 * ex;
      rate.source = "quadratic variation of perturbed fBm";
      const double limit = params.perturbed.c0 * params.perturbed.c0;
      for (std::size_t i = 0; i < ns.size(); ++i) {
        gaussian::FbmSampler sampler(h, ns[i]);
        parallel_replicates(replicates, [&](int r) {
          const Path p = sampler.sample_perturbed(params.perturbed, seed, r);
          push(i, r, variations::fbm_normalized_variation(p, h).statistic - limit);
        });
      }
      break;
    }
    case RateTarget::u0_vn: {
      rate.theoretical_exponent = l2 ? -1.0 : -0.5;
      rate.source = "quadratic variation of the linear solution";
      kernel::KernelParams kp;
      kp.alpha = params.alpha;
      const double c0 = gaussian::c0_alpha(kp);
      const double limit = c0 * c0;
      for (std::size_t i = 0; i < ns.size(); ++i) {
        gaussian::U0Sampler sampler(kp, ns[i], params.factorization_cap);
        parallel_replicates(replicates, [&](int r) {
          const Path p = sampler.sample(seed, r);
          push(i, r, variations::quad_variation_renorm(p, params.alpha).statistic - limit);
        });
      }
      break;
    }
    case RateTarget::nonlinear_vn:
    case RateTarget::nonlinear_un: {
      if (l2)
        throw std::invalid_argument("nonlinear rate targets are stated in L1; use ErrorNorm::l1");
      const double a = params.alpha;
      rate.theoretical_exponent = (a - 1.0) * (1.0 - 2.0 * a) / (2.0 * a * (2.0 * a + 1.0));
      rate.source = target == RateTarget::nonlinear_vn
                        ? "quadratic variation limit, nonlinear equation"
                        : "higher-order variation limit, nonlinear equation";
      kernel::KernelParams kp;
      kp.alpha = a;
      const double c0 = gaussian::c0_alpha(kp);
      const double vconst = c0 * c0;
      const bool is_un = target == RateTarget::nonlinear_un;
      const double p_ord = is_un ? gaussian::variation_order(a) : 2.0;
      const double uconst = is_un ? gaussian::b0_alpha(kp) : 0.0;

      spde::SimConfig base;
      base.alpha = a;
      base.theta = params.theta;
      base.sigma = params.sigma;
      base.observe_n = ns.back();
      base.n_space = params.n_space;
      base.half_length = params.half_length;
      base.seed = seed;
      const spde::ResolvedGrid grid = spde::resolve_grid(base, false);  // validate up front
      (void)grid;

      parallel_replicates(replicates, [&](int r) {
        const spde::SolveResult sol = spde::solve_nonlinear(base, r);
        const double m2 =
            variations::pathwise_sigma_integral(sol.fine_observed, sol.fine_dt, params.sigma, 2.0);
        const double mp = is_un ? variations::pathwise_sigma_integral(sol.fine_observed,
                                                                      sol.fine_dt, params.sigma,
                                                                      p_ord)
                                : 0.0;
        for (std::size_t i = 0; i < ns.size(); ++i) {
          const int n = ns[i];
          const int stride = base.observe_n / n;
          Path sub;
          sub.grid_n = n;
          sub.meta = PathKind::spde_numeric;
          sub.values.resize(n + 1);
          for (int k = 0; k <= n; ++k) sub.values[k] = sol.path.values[k * stride];
          if (is_un) {
            const double u_stat = variations::power_variation(sub, p_ord).statistic;
            push(i, r, u_stat - uconst * mp);
          } else {
            const double v_stat = variations::quad_variation_renorm(sub, a).statistic;
            push(i, r, v_stat - vconst * m2);
          }
        }
      });
      break;
    }
  }

  const auto agg = [](std::span<const double> xs) { return mean_of(xs); };
  return assemble_report(std::move(rate), ns, raw, replicates, seed, agg,
                         /*analytic_se=*/true);
}

McReport run_estimator_experiment(EstimatorTarget target, const ExperimentParams& params,
                                  std::span<const int> n_grid, int replicates,
                                  std::uint64_t seed) {
  validate_grid(n_grid, replicates, 1);
  const std::vector<int> ns(n_grid.begin(), n_grid.end());
  std::vector<std::vector<double>> raw(ns.size(), std::vector<double>(replicates, 0.0));

  RateSpec rate;
  rate.name = to_string(target);
  rate.theoretical_exponent = -0.25;  // decay is claimed only qualitatively (consistency)
  rate.source = "estimator consistency";

  kernel::KernelParams kp;
  kp.alpha = params.alpha;

  auto wrap = [&](int r, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      throw numerical_error("estimator experiment replicate " + std::to_string(r) + " (seed " +
                            std::to_string(seed) + ") failed: " + e.what());
    }
  };

  switch (target) {
    case EstimatorTarget::alpha_hat: {
      for (std::size_t i = 0; i < ns.size(); ++i) {
        gaussian::U0Sampler sampler(kp, ns[i], params.factorization_cap);
        parallel_replicates(replicates, [&](int r) {
          wrap(r, [&] {
            const Path p = sampler.sample(seed, r);
            const auto est = estimators::estimate_alpha(p, params.sigma);
            raw[i][r] = std::abs(est.estimate - params.alpha);
          });
        });
      }
      break;
    }
    case EstimatorTarget::theta1:
    case EstimatorTarget::theta2: {
      const bool quad = target == EstimatorTarget::theta1;
      const double c0 = gaussian::c0_alpha(kp);
      const double b0 = quad ? 0.0 : gaussian::b0_alpha(kp);
      for (std::size_t i = 0; i < ns.size(); ++i) {
        spde::SimConfig cfg;
        cfg.alpha = params.alpha;
        cfg.theta = params.theta;
        cfg.sigma = params.sigma;
        cfg.observe_n = ns[i];
        cfg.n_space = params.n_space;
        cfg.half_length = params.half_length;
        cfg.seed = seed;
        parallel_replicates(replicates, [&](int r) {
          wrap(r, [&] {
            const spde::SolveResult sol = spde::solve_parametrized(cfg, r);
            const auto est =
                quad ? estimators::estimate_theta_quadratic(sol.path, params.alpha, params.sigma,
                                                            c0)
                     : estimators::estimate_theta_power(sol.path, params.alpha, params.sigma, b0);
            raw[i][r] = std::abs(est.estimate - params.theta) / params.theta;
          });
        });
      }
      break;
    }
  }

  const auto agg = [](std::span<const double> xs) {
    return median_of(std::vector<double>(xs.begin(), xs.end()));
  };
  return assemble_report(std::move(rate), ns, raw, replicates, seed, agg,
                         /*analytic_se=*/false);
}

}  // namespace varheat::experiments
