#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "varheat/common.hpp"

namespace varheat::quad {

// 20-point Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on the
// Legendre recurrence, computed once.
struct GaussLegendre20 {
  static constexpr int order = 20;
  std::array<double, order> x{};
  std::array<double, order> w{};

  GaussLegendre20() {
    const int n = order;
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        const double dz = -p1 / pp;
        z += dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
  }
};

inline const GaussLegendre20& gl20() {
  static const GaussLegendre20 rule;
  return rule;
}

template <typename F>
double gl_panel(F&& f, double a, double b) {
  const auto& r = gl20();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < GaussLegendre20::order; ++i) s += r.w[i] * f(c + h * r.x[i]);
  return s * h;
}

namespace detail {

template <typename F>
double adapt(F&& f, double a, double b, double tol, double whole, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gl_panel(f, a, m);
  const double right = gl_panel(f, m, b);
  const double err = std::abs(left + right - whole);
  if (err <= tol || err <= 1e-17 * (std::abs(left) + std::abs(right)))
    return left + right;
  if (depth <= 0)
    throw numerical_error("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "], panel error " + std::to_string(err) +
                          " > tol " + std::to_string(tol));
  return adapt(f, a, m, 0.5 * tol, left, depth - 1) +
         adapt(f, m, b, 0.5 * tol, right, depth - 1);
}

}  // namespace detail

// Adaptive Gauss-Legendre on [a, b] to absolute tolerance abs_tol.
// max_panel bounds the initial panel width (oscillatory integrands: pass
// pi / (2 |frequency|) so each panel sees at most a quarter period).
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol, double max_panel = 0.0,
                 int max_depth = 48) {
  if (!(b >= a)) throw std::invalid_argument("integrate: b < a");
  if (!(abs_tol > 0)) throw std::invalid_argument("integrate: abs_tol must be positive");
  if (a == b) return 0.0;
  int npanel = 1;
  if (max_panel > 0.0 && b - a > max_panel)
    npanel = static_cast<int>(std::ceil((b - a) / max_panel));
  const double h = (b - a) / npanel;
  const double tol_per = abs_tol / npanel;
  CompensatedSum total;
  for (int k = 0; k < npanel; ++k) {
    const double pa = a + k * h;
    const double pb = (k + 1 == npanel) ? b : a + (k + 1) * h;
    const double whole = gl_panel(f, pa, pb);
    total.add(detail::adapt(f, pa, pb, tol_per, whole, max_depth));
  }
  return total.value();
}

}  // namespace varheat::quad
