#pragma once

#include <cmath>
#include <cstdint>

namespace varheat {

namespace detail {

// SplitMix64 finalizer (Steele/Lea/Flood).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Wichura's AS 241 (PPND16): inverse of the standard normal CDF, ~1e-16
// relative accuracy.
inline double inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -v : v;
}

}  // namespace detail

// Counter-based random stream: value(seed, replicate, draw) is a pure
// function of its address, so concurrent replicates and any execution order
// give identical output.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_hash_(detail::mix64(seed ^ 0x6a09e667f3bcc908ULL)) {}

  std::uint64_t bits(std::uint64_t replicate, std::uint64_t draw) const {
    std::uint64_t h = detail::mix64(seed_hash_ ^ (replicate + 0xbb67ae8584caa73bULL));
    return detail::mix64(h ^ (draw + 0x3c6ef372fe94f82bULL));
  }

  // uniform on (0, 1), never hits either endpoint
  double uniform01(std::uint64_t replicate, std::uint64_t draw) const {
    return (static_cast<double>(bits(replicate, draw) >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal(std::uint64_t replicate, std::uint64_t draw) const {
    return detail::inverse_normal_cdf(uniform01(replicate, draw));
  }

  std::uint64_t seed_hash() const { return seed_hash_; }

 private:
  std::uint64_t seed_hash_;
};

// Sequential draws from one replicate's stream.
class NormalStream {
 public:
  NormalStream(const CounterRng& rng, std::uint64_t replicate, std::uint64_t first_draw = 0)
      : rng_(rng), replicate_(replicate), next_(first_draw) {}
  double operator()() { return rng_.normal(replicate_, next_++); }
  std::uint64_t position() const { return next_; }

 private:
  CounterRng rng_;
  std::uint64_t replicate_;
  std::uint64_t next_;
};

}  // namespace varheat
