#pragma once

namespace mfv {

/// Gamma function for x > 0. Lanczos approximation (g = 7, 9 terms) with
/// reflection below 1/2; relative error below 1e-13 on (0, 50].
double gamma_fn(double x);

/// Euler beta function Gamma(p) Gamma(q) / Gamma(p + q), p, q > 0.
double beta_fn(double p, double q);

/// Normalization constant c_lambda^2 of the Volterra fBm representation,
///
///   c^2 = 2 pi l (l - 1/2)^3 / (Gamma(2 - 2l) Gamma(l + 1/2)^2 sin(pi (l - 1/2))),
///
/// so that Var X(t, l) = t^{2l} / c^2. Rejects l within 1e-6 of 1/2 or 1.
double c_lambda_sq(double lambda);

/// 1 / c_lambda^2, i.e. the variance of X(1, lambda).
double c_lambda_inv_sq(double lambda);

/// d/dl of 1 / c_lambda^2, from the logarithmic derivative
///   -1/l - 3/(l - 1/2) - 2 psi(2 - 2l) + 2 psi(l + 1/2) + pi cot(pi (l - 1/2)).
double c_lambda_inv_sq_derivative(double lambda);

/// Distance from the endpoints of (1/2, 1) below which c_lambda_sq refuses.
inline constexpr double kLambdaEndpointGuard = 1e-6;

}  // namespace mfv
