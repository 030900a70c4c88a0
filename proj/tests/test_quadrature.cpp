#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mfvolterra/errors.hpp"
#include "mfvolterra/quadrature.hpp"

using namespace mfv;

TEST_CASE("spec validation") {
  CHECK_NOTHROW(QuadratureSpec{}.validate());
  CHECK_THROWS_AS((QuadratureSpec{0.0, 1e-10, 100}.validate()), DomainError);
  CHECK_THROWS_AS((QuadratureSpec{1e-12, -1.0, 100}.validate()), DomainError);
  CHECK_THROWS_AS((QuadratureSpec{1e-12, 1e-10, 7}.validate()), DomainError);
  const auto t = QuadratureSpec{}.tightened(1e-6);
  CHECK(t.abs_tol >= 1e-16);
  CHECK(t.max_subdivisions == QuadratureSpec{}.max_subdivisions);
}

TEST_CASE("smooth integrals") {
  const auto r = integrate([](double x) { return std::exp(x); }, 0.0, 1.0, {});
  CHECK(std::abs(r.value - (std::numbers::e - 1.0)) < 1e-13);
  const auto s = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, {});
  CHECK(std::abs(s.value - 2.0) < 1e-13);
}

TEST_CASE("breakpoints split a kink") {
  const std::array<double, 3> pts{-1.0, 0.0, 2.0};
  const auto r = integrate([](double x) { return std::abs(x); }, std::span<const double>(pts), {});
  CHECK(std::abs(r.value - 2.5) < 1e-13);
}

TEST_CASE("left and right power singularities") {
  // int_0^1 x^{-0.9} dx = 10
  const auto l = integrate_left_power([](double, double off) { return std::pow(off, -0.9); }, 0.0,
                                      1.0, -0.9, {});
  CHECK(std::abs(l.value - 10.0) < 1e-10);
  // int_0^2 (2 - x)^{-0.5} cos(x) dx, reference from the left-power form
  auto g = [](double x, double off) { return std::pow(off, -0.5) * std::cos(x); };
  const auto r = integrate_right_power(g, 0.0, 2.0, -0.5, {});
  const auto ref = integrate_left_power(
      [](double x, double off) { return std::pow(off, -0.5) * std::cos(2.0 - x); }, 0.0, 2.0, -0.5,
      {});
  CHECK(std::abs(r.value - ref.value) < 1e-11);
}

TEST_CASE("tolerance error when the budget is exhausted") {
  QuadratureSpec q{1e-16, 1e-16, 8};
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(200.0 * x); }, 0.0, 10.0, q),
                  ToleranceError);
}

TEST_CASE("fixed Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {16, 24, 32}) {
    const auto& rule = gauss_legendre_unit(n);
    REQUIRE(rule.x.size() == static_cast<std::size_t>(n));
    double sum = 0.0, moment = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      sum += rule.w[i];
      moment += rule.w[i] * std::pow(rule.x[i], 2 * n - 1);
      if (i > 0) CHECK(rule.x[i] > rule.x[i - 1]);
    }
    CHECK(std::abs(sum - 1.0) < 1e-14);
    CHECK(std::abs(moment - 1.0 / (2 * n)) < 1e-14);
  }
  CHECK_THROWS(gauss_legendre_unit(7));
}
