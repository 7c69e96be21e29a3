#include "varheat/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace varheat {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("RealFft: size must be >= 2");
  real_ = fftw_alloc_real(n);
  cplx_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n / 2 + 1));
  std::lock_guard<std::mutex> lock(plan_mutex());
  plan_fwd_ = fftw_plan_dft_r2c_1d(n, real_, reinterpret_cast<fftw_complex*>(cplx_),
                                   FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cplx_), real_,
                                   FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_inv_) throw std::runtime_error("RealFft: fftw planning failed");
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_);
  fftw_free(cplx_);
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }

void RealFft::inverse() { fftw_execute(static_cast<fftw_plan>(plan_inv_)); }

ComplexFft::ComplexFft(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("ComplexFft: size must be >= 2");
  buf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n));
  std::lock_guard<std::mutex> lock(plan_mutex());
  plan_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf_),
                           reinterpret_cast<fftw_complex*>(buf_), FFTW_FORWARD, FFTW_ESTIMATE);
  if (!plan_) throw std::runtime_error("ComplexFft: fftw planning failed");
}

ComplexFft::~ComplexFft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(buf_);
}

void ComplexFft::forward() { fftw_execute(static_cast<fftw_plan>(plan_)); }

}  // namespace varheat
