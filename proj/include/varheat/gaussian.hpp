#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "varheat/kernel.hpp"
#include "varheat/path.hpp"
#include "varheat/rng.hpp"

namespace varheat::gaussian {

// E B^H_s B^H_t = (t^2H + s^2H - |t-s|^2H) / 2
double fbm_covariance(double hurst, double s, double t);

// rho_H(v) = (|v+1|^2H + |v-1|^2H - 2|v|^2H) / 2
double rho(double hurst, long v);

struct PerturbedFbmSpec {
  double c0 = 1.0;                 // amplitude of the fBm part
  double hurst = 0.25;             // H in (0,1)
  double perturbation_scale = 0.0; // c_Y of the synthetic H-self-similar part

  void validate() const;
};

enum class CovarianceBuilder { fbm, u0 };

struct CovarianceMatrix {
  // symmetric (N+1) x (N+1), row-major, first row/column zero when the
  // process starts at 0
  std::vector<double> entries;
  int grid_n = 0;
  CovarianceBuilder tag = CovarianceBuilder::u0;

  double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * (grid_n + 1) + j]; }
};

// Exact-in-law fBm on t_i = i/N via circulant embedding of the increment
// sequence; Cholesky factorization of the covariance matrix as fallback.
// One sampler instance amortizes the embedding across replicates.
class FbmSampler {
 public:
  FbmSampler(double hurst, int grid_n);
  ~FbmSampler();
  FbmSampler(FbmSampler&&) noexcept;

  Path sample(std::uint64_t seed, std::uint64_t replicate = 0) const;
  // same fBm draw plus the synthetic H-self-similar perturbation
  Path sample_perturbed(const PerturbedFbmSpec& spec, std::uint64_t seed,
                        std::uint64_t replicate = 0) const;
  bool used_fallback() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Path sample_fbm(double hurst, int grid_n, std::uint64_t seed, std::uint64_t replicate = 0);

// X_{t_i} = C0 B^H_{t_i} + c_Y t_i^H Z with Z standard normal independent of B^H
Path sample_perturbed_fbm(const PerturbedFbmSpec& spec, int grid_n, std::uint64_t seed,
                          std::uint64_t replicate = 0);

// time covariance of the linear solution at a fixed spatial point:
// (2 pi)^-1 \int (e^{-|t-s||xi|^a} - e^{-(t+s)|xi|^a}) / (2 |xi|^a) dxi
double u0_time_covariance(const kernel::KernelParams& params, double s, double t);

CovarianceMatrix u0_covariance_matrix(const kernel::KernelParams& params, int grid_n);

// Exact Gaussian sampler for u0 paths; factors the covariance once.
class U0Sampler {
 public:
  U0Sampler(const kernel::KernelParams& params, int grid_n, int factorization_cap = 8192);
  ~U0Sampler();
  U0Sampler(U0Sampler&&) noexcept;

  Path sample(std::uint64_t seed, std::uint64_t replicate = 0) const;
  double smallest_clamped_eigenvalue() const;  // 0 when the plain Cholesky succeeded

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Path sample_u0_path(const kernel::KernelParams& params, int grid_n, std::uint64_t seed,
                    std::uint64_t replicate = 0, int factorization_cap = 8192);

// C_{0,alpha} extracted from the delta-ladder of the normalized variogram of
// u0_time_covariance, first-order Richardson extrapolated; throws
// numerical_error when the last two rungs disagree by more than 1e-3 relative.
double c0_alpha(const kernel::KernelParams& params, double base_time = 1.0);

// B_{0,alpha} = C_{0,alpha}^p (p-1)!! with p = 2 alpha/(alpha-1); requires p
// to be an even integer within 1e-9.
double b0_alpha(const kernel::KernelParams& params);

// 2 alpha / (alpha - 1), the variation order attached to alpha
double variation_order(double alpha);

// Hurst index of the linear solution's temporal law, (alpha-1)/(2 alpha)
double hurst_of_alpha(double alpha);

}  // namespace varheat::gaussian
