#pragma once

#include <cstdint>

#include "varheat/common.hpp"

namespace varheat::kernel {

// Order of the fractional Laplacian and quadrature controls shared by every
// Green-kernel evaluation.
struct KernelParams {
  double alpha = 2.0;        // in (1, 2]
  double tail_cutoff = 0.0;  // frequency cutoff; 0 = derive from abs_tol and t
  double abs_tol = 1e-9;

  void validate() const;
  // cutoff so that exp(-t xi^alpha) < abs_tol beyond it
  double cutoff_for(double t) const;
};

// G_alpha(t, x) = (2 pi)^-1 \int exp(-i x xi) exp(-t |xi|^alpha) dxi,
// evaluated as (1/pi) \int_0^inf cos(x xi) exp(-t xi^alpha) dxi with panels
// capped at pi / (2|x|).
double green_kernel_value(const KernelParams& params, double t, double x);

// c_alpha = (2 pi)^-1 \int exp(-2 |xi|^alpha) dxi
double c_alpha(const KernelParams& params);             // Gamma closed form
double c_alpha_quadrature(const KernelParams& params);  // independent route

// \int_s^t da \int G_alpha(t-a, y)^2 dy = c_alpha * alpha/(alpha-1) * (t-s)^(1-1/alpha)
double kernel_l2_time_integral(const KernelParams& params, double s, double t);
double kernel_l2_time_integral_quadrature(const KernelParams& params, double s, double t);

struct KernelIntegralReport {
  double value = 0.0;
  double bound_constant = 0.0;  // value / (delta^2 (t-s)^(-(alpha+1)/alpha))
  double s = 0.0, t = 0.0, delta = 0.0;
};

// I(s, t, delta) = (2 pi)^-1 \int (1 - e^{-delta |xi|^alpha})^2
//                  (e^{-2(t-s)|xi|^alpha} - e^{-2t|xi|^alpha}) / (2 |xi|^alpha) dxi
KernelIntegralReport increment_kernel_integral(const KernelParams& params, double s, double t,
                                               double delta);

struct KernelPropertyReport {
  double normalization_error = 0.0;  // | \int G dx - 1 |
  double symmetry_error = 0.0;       // max |G(t,x) - G(t,-x)| over test points
  double scaling_error = 0.0;        // vs t^{-1/alpha} G(1, t^{-1/alpha} x)
  double sandwich_min = 0.0;         // empirical K'_alpha envelope
  double sandwich_max = 0.0;         // empirical K_alpha envelope
  bool all_positive = false;         // G > 0 on every evaluated point
};

KernelPropertyReport kernel_property_check(const KernelParams& params, double t);

}  // namespace varheat::kernel
