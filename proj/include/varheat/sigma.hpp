#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace varheat {

// Diffusion coefficient families admitted by the solver; each is globally
// Lipschitz with a computable constant.
struct SigmaSpec {
  enum class Kind { constant, affine, sinusoidal };

  Kind kind = Kind::constant;
  double a = 1.0;
  double b = 0.0;
  double omega = 1.0;

  static SigmaSpec constant(double c) { return {Kind::constant, c, 0.0, 1.0}; }
  static SigmaSpec affine(double a, double b) { return {Kind::affine, a, b, 1.0}; }
  static SigmaSpec sinusoidal(double a, double b, double omega) {
    return {Kind::sinusoidal, a, b, omega};
  }

  double operator()(double x) const {
    switch (kind) {
      case Kind::constant: return a;
      case Kind::affine: return a + b * x;
      case Kind::sinusoidal: return a + b * std::sin(omega * x);
    }
    return a;
  }

  double lipschitz_constant() const {
    switch (kind) {
      case Kind::constant: return 0.0;
      case Kind::affine: return std::abs(b);
      case Kind::sinusoidal: return std::abs(b * omega);
    }
    return 0.0;
  }

  // sigma scaled by a positive factor (the drift transform needs theta^-1/2 sigma)
  SigmaSpec scaled(double factor) const {
    SigmaSpec s = *this;
    s.a *= factor;
    s.b *= factor;
    return s;
  }

  bool is_identically(double c) const {
    return (kind == Kind::constant && a == c) || (b == 0.0 && a == c);
  }

  std::string label() const {
    switch (kind) {
      case Kind::constant: return "constant:" + std::to_string(a);
      case Kind::affine: return "affine:" + std::to_string(a) + "," + std::to_string(b);
      case Kind::sinusoidal:
        return "sinusoidal:" + std::to_string(a) + "," + std::to_string(b) + "," +
               std::to_string(omega);
    }
    return "constant:1";
  }

  static SigmaSpec parse(const std::string& text);
};

}  // namespace varheat
