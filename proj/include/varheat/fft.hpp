#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace varheat {

// Thin RAII wrapper over FFTW's 1-D transforms. Each instance owns aligned
// buffers and plans; plan creation is serialized internally (FFTW planning is
// not thread-safe), execution is safe on the owning thread.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }

  double* real_buffer() { return real_; }
  std::complex<double>* complex_buffer() { return cplx_; }

  // DFT of real_buffer into complex_buffer (unnormalized)
  void forward();
  // inverse DFT of complex_buffer into real_buffer (unnormalized; destroys
  // complex_buffer, as FFTW's c2r does)
  void inverse();

 private:
  int n_;
  double* real_;
  std::complex<double>* cplx_;
  void* plan_fwd_;
  void* plan_inv_;
};

class ComplexFft {
 public:
  explicit ComplexFft(int n);
  ~ComplexFft();
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;

  int size() const { return n_; }
  std::complex<double>* buffer() { return buf_; }
  void forward();  // in-place, unnormalized

 private:
  int n_;
  std::complex<double>* buf_;
  void* plan_;
};

}  // namespace varheat
