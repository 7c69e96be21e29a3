#include "varheat/gaussian.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "varheat/fft.hpp"
#include "varheat/quadrature.hpp"

namespace varheat::gaussian {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Dense factor B with B B^T = A. Plain Cholesky in place first; if A is only
// semidefinite up to roundoff, eigenvalues in [-1e-8 lambda_max, 0) are
// clamped to zero; anything below that tolerance is a hard failure. The
// rebuild callback regenerates A for the clamping route, which keeps peak
// memory at a single matrix.
struct GaussianFactor {
  Eigen::MatrixXd b;            // lower-triangular or clamped eigenfactor
  double clamped_min = 0.0;     // most negative eigenvalue seen (0 if potrf ok)

  Eigen::VectorXd apply(const Eigen::VectorXd& z) const {
    if (clamped_min == 0.0) return b.triangularView<Eigen::Lower>() * z;
    return b * z;
  }
};

template <typename Rebuild>
GaussianFactor factor_covariance(Eigen::MatrixXd&& a, Rebuild&& rebuild) {
  const int n = static_cast<int>(a.rows());
  const int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, a.data(), n);
  GaussianFactor f;
  if (info == 0) {
    a.triangularView<Eigen::StrictlyUpper>().setZero();
    f.b = std::move(a);
    return f;
  }
  a.resize(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rebuild());
  if (eig.info() != Eigen::Success)
    throw numerical_error("covariance factorization: eigendecomposition failed");
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin < -1e-8 * lmax)
    throw numerical_error("covariance matrix indefinite beyond tolerance, smallest eigenvalue " +
                          std::to_string(lmin) + " vs largest " + std::to_string(lmax));
  Eigen::VectorXd d = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  f.b = eig.eigenvectors() * d.asDiagonal();
  f.clamped_min = std::min(lmin, 0.0);
  return f;
}

}  // namespace

double fbm_covariance(double hurst, double s, double t) {
  if (!(hurst > 0.0) || !(hurst < 1.0))
    throw std::invalid_argument("fbm_covariance: hurst must lie in (0, 1)");
  if (s < 0.0 || t < 0.0) throw std::invalid_argument("fbm_covariance: times must be >= 0");
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

double rho(double hurst, long v) {
  const double h2 = 2.0 * hurst;
  const double av = std::abs(static_cast<double>(v));
  return 0.5 * (std::pow(av + 1.0, h2) + std::pow(std::abs(av - 1.0), h2) - 2.0 * std::pow(av, h2));
}

void PerturbedFbmSpec::validate() const {
  if (!(c0 > 0.0)) throw std::invalid_argument("PerturbedFbmSpec: c0 must be positive");
  if (!(hurst > 0.0) || !(hurst < 1.0))
    throw std::invalid_argument("PerturbedFbmSpec: hurst must lie in (0, 1)");
}

// ---------------------------------------------------------------------------
// fBm sampling

struct FbmSampler::Impl {
  double hurst;
  int n;
  bool fallback = false;
  std::vector<double> lambda;   // circulant eigenvalues, size n+1 (half spectrum of 2n)
  GaussianFactor factor;        // fallback factor, n x n
};

FbmSampler::FbmSampler(double hurst, int grid_n) : impl_(std::make_unique<Impl>()) {
  if (!(hurst > 0.0) || !(hurst < 1.0))
    throw std::invalid_argument("FbmSampler: hurst must lie in (0, 1)");
  if (grid_n < 2) throw std::invalid_argument("FbmSampler: grid_n must be >= 2");
  impl_->hurst = hurst;
  impl_->n = grid_n;

  // stationary increment autocovariance gamma(k) = N^-2H rho_H(k), embedded
  // in a circle of length 2N
  const int m = 2 * grid_n;
  const double var = std::pow(static_cast<double>(grid_n), -2.0 * hurst);
  RealFft fft(m);
  double* c = fft.real_buffer();
  for (int j = 0; j < m; ++j) {
    const int k = std::min(j, m - j);
    c[j] = var * rho(hurst, k);
  }
  fft.forward();
  auto* spec = fft.complex_buffer();
  impl_->lambda.resize(grid_n + 1);
  double lmax = 0.0, lmin = 0.0;
  for (int j = 0; j <= grid_n; ++j) {
    impl_->lambda[j] = spec[j].real();
    lmax = std::max(lmax, impl_->lambda[j]);
    lmin = std::min(lmin, impl_->lambda[j]);
  }
  if (lmin < -1e-10 * lmax) {
    // embedding not nonnegative definite: factor the path covariance instead
    impl_->fallback = true;
    auto build = [&] {
      Eigen::MatrixXd cov(grid_n, grid_n);
      for (int i = 1; i <= grid_n; ++i)
        for (int j = 1; j <= grid_n; ++j)
          cov(i - 1, j - 1) = fbm_covariance(hurst, i / double(grid_n), j / double(grid_n));
      return cov;
    };
    impl_->factor = factor_covariance(build(), build);
  } else {
    for (double& l : impl_->lambda) l = std::max(l, 0.0);
  }
}

FbmSampler::~FbmSampler() = default;
FbmSampler::FbmSampler(FbmSampler&&) noexcept = default;

bool FbmSampler::used_fallback() const { return impl_->fallback; }

Path FbmSampler::sample(std::uint64_t seed, std::uint64_t replicate) const {
  const int n = impl_->n;
  Path p;
  p.grid_n = n;
  p.meta = PathKind::fbm;
  p.param = impl_->hurst;
  p.seed = seed;
  p.values.assign(n + 1, 0.0);
  CounterRng rng(seed);

  if (impl_->fallback) {
    Eigen::VectorXd z(n);
    for (int j = 0; j < n; ++j) z[j] = rng.normal(replicate, j);
    Eigen::VectorXd y = impl_->factor.apply(z);
    for (int i = 1; i <= n; ++i) p.values[i] = y[i - 1];
    return p;
  }

  const int m = 2 * n;
  RealFft fft(m);
  auto* w = fft.complex_buffer();
  w[0] = {std::sqrt(impl_->lambda[0]) * rng.normal(replicate, 0), 0.0};
  for (int k = 1; k < n; ++k) {
    const double s = std::sqrt(0.5 * impl_->lambda[k]);
    w[k] = {s * rng.normal(replicate, 2 * k - 1), s * rng.normal(replicate, 2 * k)};
  }
  w[n] = {std::sqrt(impl_->lambda[n]) * rng.normal(replicate, 2 * n - 1), 0.0};
  fft.inverse();
  const double* g = fft.real_buffer();
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  double acc = 0.0;
  for (int i = 1; i <= n; ++i) {
    acc += g[i - 1] * norm;
    p.values[i] = acc;
  }
  return p;
}

Path FbmSampler::sample_perturbed(const PerturbedFbmSpec& spec, std::uint64_t seed,
                                  std::uint64_t replicate) const {
  spec.validate();
  if (spec.hurst != impl_->hurst)
    throw std::invalid_argument("FbmSampler: spec.hurst differs from the sampler's hurst");
  Path p = sample(seed, replicate);
  p.meta = PathKind::perturbed;
  // Z sits past the 2N draws the fBm sample can consume
  const int n = impl_->n;
  const double z = CounterRng(seed).normal(replicate, 2 * static_cast<std::uint64_t>(n));
  for (int i = 0; i <= n; ++i) {
    const double ti = static_cast<double>(i) / n;
    p.values[i] =
        spec.c0 * p.values[i] + spec.perturbation_scale * std::pow(ti, spec.hurst) * z;
  }
  return p;
}

Path sample_fbm(double hurst, int grid_n, std::uint64_t seed, std::uint64_t replicate) {
  return FbmSampler(hurst, grid_n).sample(seed, replicate);
}

Path sample_perturbed_fbm(const PerturbedFbmSpec& spec, int grid_n, std::uint64_t seed,
                          std::uint64_t replicate) {
  return FbmSampler(spec.hurst, grid_n).sample_perturbed(spec, seed, replicate);
}

// ---------------------------------------------------------------------------
// u0: exact Gaussian law of the linear solution in time

namespace {

// J(tau) = \int_0^inf (1 - e^{-tau xi^a}) xi^-a dxi; the xi^-a tail beyond the
// cutoff is added in closed form.
double u0_J(const kernel::KernelParams& params, double tau) {
  if (tau == 0.0) return 0.0;
  const double a = params.alpha;
  const double tol = params.abs_tol;
  const double xi_max = std::pow((std::log(1.0 / tol) + 6.0) / tau, 1.0 / a);
  auto f = [&](double xi) {
    if (xi <= 0.0) return tau;
    const double p = std::pow(xi, a);
    return -std::expm1(-tau * p) / p;
  };
  const double body = quad::integrate(f, 0.0, xi_max, tol);
  return body + std::pow(xi_max, 1.0 - a) / (a - 1.0);
}

}  // namespace

double u0_time_covariance(const kernel::KernelParams& params, double s, double t) {
  params.validate();
  if (s < 0.0 || t < 0.0) throw std::invalid_argument("u0_time_covariance: times must be >= 0");
  if (s == 0.0 || t == 0.0) return 0.0;
  return (u0_J(params, t + s) - u0_J(params, std::abs(t - s))) / (2.0 * kPi);
}

namespace {

std::vector<double> u0_J_table(const kernel::KernelParams& params, int grid_n) {
  std::vector<double> jv(2 * grid_n + 1);
  jv[0] = 0.0;
  for (int k = 1; k <= 2 * grid_n; ++k)
    jv[k] = u0_J(params, static_cast<double>(k) / grid_n);
  return jv;
}

}  // namespace

CovarianceMatrix u0_covariance_matrix(const kernel::KernelParams& params, int grid_n) {
  params.validate();
  if (grid_n < 1) throw std::invalid_argument("u0_covariance_matrix: grid_n must be >= 1");
  const auto jv = u0_J_table(params, grid_n);
  CovarianceMatrix cov;
  cov.grid_n = grid_n;
  cov.tag = CovarianceBuilder::u0;
  cov.entries.assign(static_cast<std::size_t>(grid_n + 1) * (grid_n + 1), 0.0);
  for (int i = 1; i <= grid_n; ++i)
    for (int j = 1; j <= grid_n; ++j)
      cov.entries[static_cast<std::size_t>(i) * (grid_n + 1) + j] =
          (jv[i + j] - jv[std::abs(i - j)]) / (2.0 * kPi);
  return cov;
}

struct U0Sampler::Impl {
  kernel::KernelParams params;
  int n;
  GaussianFactor factor;
};

U0Sampler::U0Sampler(const kernel::KernelParams& params, int grid_n, int factorization_cap)
    : impl_(std::make_unique<Impl>()) {
  params.validate();
  if (grid_n < 2) throw std::invalid_argument("U0Sampler: grid_n must be >= 2");
  if (grid_n > factorization_cap)
    throw std::invalid_argument("U0Sampler: grid_n exceeds the factorization cap (" +
                                std::to_string(factorization_cap) + ")");
  impl_->params = params;
  impl_->n = grid_n;
  const auto jv = u0_J_table(params, grid_n);
  auto build = [&] {
    Eigen::MatrixXd cov(grid_n, grid_n);
    for (int j = 1; j <= grid_n; ++j)
      for (int i = 1; i <= grid_n; ++i)
        cov(i - 1, j - 1) = (jv[i + j] - jv[std::abs(i - j)]) / (2.0 * kPi);
    return cov;
  };
  impl_->factor = factor_covariance(build(), build);
}

U0Sampler::~U0Sampler() = default;
U0Sampler::U0Sampler(U0Sampler&&) noexcept = default;

double U0Sampler::smallest_clamped_eigenvalue() const { return impl_->factor.clamped_min; }

Path U0Sampler::sample(std::uint64_t seed, std::uint64_t replicate) const {
  const int n = impl_->n;
  Path p;
  p.grid_n = n;
  p.meta = PathKind::u0_exact;
  p.param = impl_->params.alpha;
  p.seed = seed;
  p.values.assign(n + 1, 0.0);
  CounterRng rng(seed);
  Eigen::VectorXd z(n);
  for (int j = 0; j < n; ++j) z[j] = rng.normal(replicate, j);
  Eigen::VectorXd y = impl_->factor.apply(z);
  for (int i = 1; i <= n; ++i) p.values[i] = y[i - 1];
  return p;
}

Path sample_u0_path(const kernel::KernelParams& params, int grid_n, std::uint64_t seed,
                    std::uint64_t replicate, int factorization_cap) {
  return U0Sampler(params, grid_n, factorization_cap).sample(seed, replicate);
}

// ---------------------------------------------------------------------------
// constants

double hurst_of_alpha(double alpha) { return (alpha - 1.0) / (2.0 * alpha); }

double variation_order(double alpha) { return 2.0 * alpha / (alpha - 1.0); }

double c0_alpha(const kernel::KernelParams& params, double base_time) {
  params.validate();
  if (!(base_time > 0.0)) throw std::invalid_argument("c0_alpha: base_time must be positive");
  kernel::KernelParams tight = params;
  tight.abs_tol = std::min(params.abs_tol, 1e-10);
  const double h2 = 2.0 * hurst_of_alpha(params.alpha);
  const double t = base_time;

  // normalized variogram phi(delta) = E(u0(t+d) - u0(t))^2 / d^2H on a
  // halving ladder, then first-order Richardson
  constexpr int kFirst = 6, kLast = 14;
  std::vector<double> phi;
  for (int k = kFirst; k <= kLast; ++k) {
    const double d = std::ldexp(1.0, -k);
    const double v = u0_time_covariance(tight, t + d, t + d) -
                     2.0 * u0_time_covariance(tight, t, t + d) +
                     u0_time_covariance(tight, t, t);
    phi.push_back(v / std::pow(d, h2));
  }
  std::vector<double> extrap;
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) extrap.push_back(2.0 * phi[i + 1] - phi[i]);
  const double last = extrap.back();
  const double prev = extrap[extrap.size() - 2];
  if (std::abs(last - prev) > 1e-3 * std::abs(last))
    throw numerical_error("c0_alpha: ladder extrapolation not stable, last rungs " +
                          std::to_string(prev) + " vs " + std::to_string(last));
  if (!(last > 0.0)) throw numerical_error("c0_alpha: nonpositive limit");
  return std::sqrt(last);
}

double b0_alpha(const kernel::KernelParams& params) {
  params.validate();
  const double p = variation_order(params.alpha);
  const double rounded = std::round(p);
  if (std::abs(p - rounded) > 1e-9 || static_cast<long>(rounded) % 2 != 0)
    throw std::invalid_argument("b0_alpha: 2 alpha/(alpha-1) = " + std::to_string(p) +
                                " is not an even integer");
  const int ip = static_cast<int>(rounded);
  return std::pow(c0_alpha(params), ip) * gaussian_even_moment(ip);
}

}  // namespace varheat::gaussian
