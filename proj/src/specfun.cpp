#include "mfvolterra/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "mfvolterra/errors.hpp"

namespace mfv {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_gamma(double x) {
  // Gamma(x) for x >= 1/2.
  const double z = x - 1.0;
  double series = kLanczosCoef[0];
  for (std::size_t k = 1; k < kLanczosCoef.size(); ++k) {
    series += kLanczosCoef[k] / (z + static_cast<double>(k));
  }
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::exp((z + 0.5) * std::log(t) - t) * series;
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("gamma_fn: argument must be a finite positive number, got " +
                      std::to_string(x));
  }
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
  }
  return lanczos_gamma(x);
}

double beta_fn(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) {
    throw DomainError("beta_fn: both arguments must be positive");
  }
  if (p + q > 150.0) {
    return std::exp(std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q));
  }
  return gamma_fn(p) * gamma_fn(q) / gamma_fn(p + q);
}

double c_lambda_sq(double lambda) {
  if (!(lambda > 0.5 + kLambdaEndpointGuard && lambda < 1.0 - kLambdaEndpointGuard)) {
    throw DomainError("c_lambda_sq: lambda must lie in (1/2, 1) at least 1e-6 away from "
                      "the endpoints, got " + std::to_string(lambda));
  }
  const double pi = std::numbers::pi;
  const double shifted = lambda - 0.5;
  const double g = gamma_fn(lambda + 0.5);
  const double num = 2.0 * pi * lambda * shifted * shifted * shifted;
  const double den = gamma_fn(2.0 - 2.0 * lambda) * g * g * std::sin(pi * shifted);
  return num / den;
}

double c_lambda_inv_sq(double lambda) { return 1.0 / c_lambda_sq(lambda); }

double c_lambda_inv_sq_derivative(double lambda) {
  using boost::math::digamma;
  const double pi = std::numbers::pi;
  const double shifted = lambda - 0.5;
  const double dlog = -1.0 / lambda - 3.0 / shifted - 2.0 * digamma(2.0 - 2.0 * lambda) +
                      2.0 * digamma(lambda + 0.5) + pi / std::tan(pi * shifted);
  return c_lambda_inv_sq(lambda) * dlog;
}

}  // namespace mfv
