#pragma once

#include "mfvolterra/hurst.hpp"
#include "mfvolterra/quadrature.hpp"

namespace mfv {

/// Integral over [s, t] of (y - u)^{H - 3/2} y^{H - 1/2} dy for 0 <= u <= s <= t.
///
/// The substitution y = u + w^p, p = 1 / (H - 1/2), turns the integrand into the
/// bounded p (u + w^p)^{H - 1/2}; with u = s this is the bracket of the Volterra
/// kernel, with u < s a tail piece of it.
double kernel_segment(double u, double s, double t, double H, const QuadratureSpec& q);

/// Volterra kernel of fBm (unnormalized, H in (1/2, 1)):
///   K_H(t, u) = u^{1/2 - H} * integral_u^t (y - u)^{H - 3/2} y^{H - 1/2} dy,  0 < u <= t.
double volterra_kernel(double t, double u, double H, const QuadratureSpec& q = {});

/// K_H(u + gap, u) with the gap t - u supplied directly, for u close to t where
/// forming t - u by subtraction would lose digits.
double volterra_kernel_gap(double u, double gap, double H, const QuadratureSpec& q = {});

/// Multifractional kernel K_{h(t)}(t, u): the fBm kernel with H frozen at h(t).
double volterra_kernel(double t, double u, const HurstFunction& h,
                       const QuadratureSpec& q = {});

/// d/dH K_H(t, u), 0 < u < t:
///   (-log u) u^{1/2-H} J_0 + u^{1/2-H} J_1,
/// where J_0 is the kernel bracket and J_1 the same integral weighted by
/// log(y - u) + log y.
double volterra_kernel_dH(double t, double u, double H, const QuadratureSpec& q = {});

/// Integral over [s, t] of K_H(t, u)^2 du: the variance of B(t) that is not
/// explained by the driving noise on [0, s].
double kernel_l2_tail(double s, double t, double H, const QuadratureSpec& q = {});

/// Dominating function Phi_T(s) = C (1 v |log s|) s^{1/2 - b} for |dK_lambda(t, s)/d lambda|
/// over lambda in [a, b], t in (s, T].
///
/// C is calibrated numerically: 1.1 times the largest ratio
/// |dK/dlambda| / ((1 v |log s|) s^{1/2-b}) found by a 40 x 24 x 12 (s, t - s, lambda)
/// lattice (geometric gaps t - s) refined by compass search from its six best points,
/// and never below 1.1 times the s -> 0 limit of that ratio, T^{2b-1} / (2b - 1).
class PhiBound {
 public:
  PhiBound(double a, double b, double horizon, const QuadratureSpec& q = {});

  double operator()(double s) const;
  double constant() const { return constant_; }
  double lower() const { return a_; }
  double upper() const { return b_; }
  double horizon() const { return horizon_; }
  /// Integral of Phi_T(s)^2 over (0, T]; the constant C_T of the
  /// E[(X(t,l) - X(t,l'))^2] <= C_T |l - l'|^2 estimate.
  double l2_norm_sq() const { return l2_norm_sq_; }

 private:
  double a_, b_, horizon_;
  double constant_ = 0.0;
  double l2_norm_sq_ = 0.0;
};

/// Phi_T(s) using a cached PhiBound calibration for (a, b, T).
double phi_bound(double s, double horizon, double a, double b);

/// Cached calibration shared by phi_bound().
const PhiBound& phi_bound_calibration(double a, double b, double horizon);

/// Sum of |K_{h(t_i)}(t_i, s) - K_{h(t_{i-1})}(t_{i-1}, s)| over the n equally spaced
/// points t_0 = s < ... < t_{n-1} = T (K(s, s) = 0).
double kernel_total_variation(double s, double horizon, const HurstFunction& h, int n,
                              const QuadratureSpec& q = {});

/// Upper bound on kernel_total_variation for every n:
///   K_a(T, s) + K_b(T, s) + Var_{[s,T]}(h) * Phi_T(s).
double kernel_total_variation_bound(double s, double horizon, const HurstFunction& h,
                                    const QuadratureSpec& q = {});

}  // namespace mfv
