#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace varheat {

// Quadrature failed to converge, a covariance turned out indefinite, a field
// blew up mid-simulation, ... anything where the inputs were legal but the
// numerics did not cooperate.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// A_N <= 1: the log-ratio estimator has no value at this sample size.
class estimator_undefined : public std::runtime_error {
 public:
  explicit estimator_undefined(const std::string& what) : std::runtime_error(what) {}
};

// Zero variation / vanishing denominator: the data cannot carry the estimate.
class degenerate_input : public std::runtime_error {
 public:
  explicit degenerate_input(const std::string& what) : std::runtime_error(what) {}
};

// Neumaier compensated summation. N can reach 2^14 with increments of wildly
// different magnitude, so plain accumulation is not good enough.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares of y against x.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

// (p-1)!! for even p; equals E Z^p for Z ~ N(0,1).
inline double gaussian_even_moment(int p) {
  if (p < 0 || p % 2 != 0) throw std::invalid_argument("gaussian_even_moment: p must be even >= 0");
  double m = 1.0;
  for (int k = p - 1; k > 1; k -= 2) m *= static_cast<double>(k);
  return m;
}

}  // namespace varheat
