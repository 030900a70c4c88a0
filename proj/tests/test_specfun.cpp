#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "mfvolterra/errors.hpp"
#include "mfvolterra/specfun.hpp"

using namespace mfv;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("gamma at pinned points") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rel(gamma_fn(0.5), std::sqrt(std::numbers::pi)) < 1e-13);
  // mpmath, 30 digits
  CHECK(rel(gamma_fn(0.25), 3.62560990822190831193) < 1e-13);
}

TEST_CASE("gamma matches boost tgamma on (0, 50]") {
  double worst = 0.0;
  for (int i = 1; i <= 500; ++i) {
    const double x = 0.1 * i;
    worst = std::max(worst, rel(gamma_fn(x), boost::math::tgamma(x)));
  }
  CHECK(worst < 1e-12);
  for (double x : {1e-3, 0.013, 0.377, 0.999}) CHECK(rel(gamma_fn(x), boost::math::tgamma(x)) < 1e-12);
}

TEST_CASE("gamma rejects non-positive arguments") {
  CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
  CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
}

TEST_CASE("reflection formula") {
  for (int k = 1; k <= 9; ++k) {
    const double x = 0.1 * k;
    const double s = std::sin(std::numbers::pi * x);
    CHECK(std::abs(gamma_fn(x) * gamma_fn(1.0 - x) - std::numbers::pi / s) <=
          1e-10 * std::numbers::pi / std::abs(s));
  }
}

TEST_CASE("beta values and symmetry") {
  CHECK(beta_fn(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rel(beta_fn(0.5, 0.5), std::numbers::pi) < 1e-13);
  CHECK(rel(beta_fn(0.5, 0.25), 5.24411510858423962092) < 1e-13);
  for (double p : {0.3, 0.7, 1.9, 4.2}) {
    for (double q : {0.05, 0.5, 2.5}) {
      CHECK(rel(beta_fn(p, q), beta_fn(q, p)) <= 1e-14);
      CHECK(rel(beta_fn(p, q), boost::math::beta(p, q)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(beta_fn(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(beta_fn(1.0, -2.0), DomainError);
}

TEST_CASE("normalization constant at 0.75") {
  // mpmath: c^2(0.75) and its reciprocal
  CHECK(rel(c_lambda_sq(0.75), 0.0715087278282949863808) < 1e-13);
  CHECK(rel(c_lambda_inv_sq(0.75), 13.9843069562246389891) < 1e-13);
  CHECK(rel(c_lambda_inv_sq(0.75), beta_fn(0.5, 0.25) / 0.375) < 1e-13);
  CHECK(c_lambda_sq(0.75) == c_lambda_sq(0.75));
}

TEST_CASE("normalization identity on 50 points") {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double l = 0.55 + 0.4 * i / 49.0;
    const double b = beta_fn(2.0 - 2.0 * l, l - 0.5);
    worst = std::max(worst, std::abs(c_lambda_inv_sq(l) * l * (2.0 * l - 1.0) - b) / b);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("normalization constant rejects the endpoints") {
  CHECK_THROWS_AS(c_lambda_sq(0.5), DomainError);
  CHECK_THROWS_AS(c_lambda_sq(0.5 + 5e-7), DomainError);
  CHECK_THROWS_AS(c_lambda_sq(1.0 - 5e-7), DomainError);
  CHECK_THROWS_AS(c_lambda_sq(1.2), DomainError);
  CHECK_NOTHROW(c_lambda_sq(0.5 + 2e-6));
}

TEST_CASE("derivative of the reciprocal constant") {
  // mpmath numerical differentiation at 30 digits
  CHECK(rel(c_lambda_inv_sq_derivative(0.55), -15209.1067417394044) < 1e-11);
  CHECK(rel(c_lambda_inv_sq_derivative(0.75), -93.9693363107819527) < 1e-11);
  CHECK(rel(c_lambda_inv_sq_derivative(0.95), 184.329459332826732) < 1e-11);
}
