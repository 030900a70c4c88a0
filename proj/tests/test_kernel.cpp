#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mfvolterra/errors.hpp"
#include "mfvolterra/kernel.hpp"
#include "mfvolterra/rng.hpp"

using namespace mfv;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double uniform(std::uint32_t i, int lane) {
  const auto b = philox4x32({i, 7u, 0u, 0u}, {2024u, 6u});
  return (b[static_cast<std::size_t>(lane)] + 0.5) / 4294967296.0;
}

}  // namespace

TEST_CASE("kernel vanishes on the diagonal") {
  CHECK(volterra_kernel(1.0, 1.0, 0.75) == 0.0);
  for (double H : {0.55, 0.7, 0.95}) {
    for (double t : {0.01, 0.5, 3.0}) CHECK(volterra_kernel(t, t, H) == 0.0);
  }
}

TEST_CASE("kernel pinned values") {
  // 10^6-panel midpoint rule after the singularity substitution (numpy)
  CHECK(rel(volterra_kernel(1.0, 0.25, 0.75), 4.107089566711189) < 1e-10);
  CHECK(rel(volterra_kernel(1.0, 0.5, 0.6), 9.400804336882441) < 1e-10);
  // 8-digit regression pin
  CHECK(volterra_kernel(1.0, 0.25, 0.75) == doctest::Approx(4.1070896).epsilon(1e-8));
}

TEST_CASE("kernel domain") {
  CHECK_THROWS_AS(volterra_kernel(1.0, 0.0, 0.75), DomainError);
  CHECK_THROWS_AS(volterra_kernel(1.0, 1.5, 0.75), DomainError);
  CHECK_THROWS_AS(volterra_kernel(1.0, 0.5, 0.4), DomainError);
}

TEST_CASE("self-similarity of the kernel") {
  CHECK(rel(volterra_kernel(2.0, 0.5, 0.75), std::pow(2.0, 0.25) * volterra_kernel(1.0, 0.25, 0.75)) <
        1e-8);
  for (std::uint32_t i = 0; i < 50; ++i) {
    const double c = 4.0 * uniform(i, 0);
    const double t = 0.05 + uniform(i, 1);
    const double u = t * uniform(i, 2);
    const double H = 0.55 + 0.4 * uniform(i, 3);
    CHECK(rel(volterra_kernel(c * t, c * u, H), std::pow(c, H - 0.5) * volterra_kernel(t, u, H)) <
          1e-8);
  }
}

TEST_CASE("halving the tolerances moves the kernel by less than the coarse tolerance") {
  const QuadratureSpec coarse{1e-10, 1e-8, 400};
  const QuadratureSpec fine{0.5e-10, 0.5e-8, 400};
  for (std::uint32_t i = 0; i < 100; ++i) {
    const double t = 0.01 + 2.0 * uniform(100 + i, 0);
    const double u = t * (0.001 + 0.998 * uniform(100 + i, 1));
    const double H = 0.52 + 0.46 * uniform(100 + i, 2);
    const double a = volterra_kernel(t, u, H, coarse);
    const double b = volterra_kernel(t, u, H, fine);
    CHECK(std::abs(a - b) <= std::max(coarse.abs_tol, coarse.rel_tol * std::abs(b)));
  }
}

TEST_CASE("gap form agrees with the subtraction form") {
  for (double gap : {1e-9, 1e-4, 0.3}) {
    CHECK(rel(volterra_kernel_gap(0.5, gap, 0.7), volterra_kernel(0.5 + gap, 0.5, 0.7)) < 1e-6);
  }
}

TEST_CASE("multifractional kernel freezes H at h(t)") {
  const auto hc = HurstFunction::constant(0.75);
  CHECK(volterra_kernel(1.0, 0.25, hc) == volterra_kernel(1.0, 0.25, 0.75));
  const auto h = HurstFunction::sinusoidal(0.75, 0.15, 2.0 * std::numbers::pi, 0.3);
  CHECK(volterra_kernel(1.0, 0.25, h) == volterra_kernel(1.0, 0.25, h(1.0)));
  CHECK(volterra_kernel(1.0, 1.0, h) == 0.0);
}

TEST_CASE("H-derivative of the kernel") {
  const double d = 1e-4;
  const double fd = (volterra_kernel(1.0, 0.25, 0.75 + d) - volterra_kernel(1.0, 0.25, 0.75 - d)) / (2 * d);
  CHECK(std::abs(volterra_kernel_dH(1.0, 0.25, 0.75) - fd) <= 1e-4);
}

TEST_CASE("H-derivative vanishes as u approaches t") {
  // |dK/dH| ~ (t - u)^{H - 1/2} |log(t - u)|: slow but monotone decay
  double prev = std::abs(volterra_kernel_dH(1.0, 1.0 - 1e-2, 0.75));
  for (double gap : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
    const double cur = std::abs(volterra_kernel_dH(1.0, 1.0 - gap, 0.75));
    CHECK(cur < prev);
    CHECK(cur <= 8.0 * std::pow(gap, 0.25) * std::abs(std::log(gap)));
    prev = cur;
  }
  CHECK(prev < 0.15);
}

TEST_CASE("two-term form of the H-derivative") {
  // dK/dH = (-log u) K + u^{1/2-H} int_u^t (y-u)^{H-3/2} y^{H-1/2} (log(y-u) + log y) dy;
  // at u = e^-2 the first term is 2 K > 0.
  const double u = std::exp(-2.0), t = 1.0, H = 0.75;
  const double first = -std::log(u) * volterra_kernel(t, u, H);
  CHECK(first == doctest::Approx(2.0 * volterra_kernel(t, u, H)));
  CHECK(first > 0.0);
  auto g = [&](double y, double off) {
    return std::pow(off, H - 1.5) * std::pow(y, H - 0.5) * (std::log(off) + std::log(y));
  };
  // log singularity at the left end: use a slightly stronger substitution
  const double second =
      std::pow(u, 0.5 - H) * integrate_left_power(g, u, t, H - 1.5 - 0.05, {1e-13, 1e-11, 4000}).value;
  CHECK(volterra_kernel_dH(t, u, H) == doctest::Approx(first + second).epsilon(1e-8));
}

TEST_CASE("Phi bound dominates the H-derivative") {
  const double T = 1.0, a = 0.6, b = 0.9;
  const PhiBound& phi = phi_bound_calibration(a, b, T);
  CHECK(phi.constant() > 0.0);
  for (int i = 1; i <= 20; ++i) {
    const double t = 0.1 + 0.9 * i / 20.0;
    for (int j = 0; j < 20; ++j) {
      const double lambda = a + (b - a) * j / 19.0;
      CHECK(std::abs(volterra_kernel_dH(t, 0.1, lambda)) <= phi_bound(0.1, T, a, b));
    }
  }
  for (std::uint32_t i = 0; i < 1000; ++i) {
    const double s = std::pow(10.0, -8.0 * uniform(300 + i, 0));
    const double t = s + (T - s) * uniform(300 + i, 1);
    const double lambda = a + (b - a) * uniform(300 + i, 2);
    if (t <= s) continue;
    CHECK(std::abs(volterra_kernel_dH(t, s, lambda)) <= phi(s));
  }
  CHECK(phi(1e-8) > phi(1e-4));
  CHECK(phi(1e-4) > phi(1e-2));
  CHECK(std::isfinite(phi.l2_norm_sq()));
  CHECK(phi.l2_norm_sq() > 0.0);
  CHECK_THROWS_AS(phi_bound(0.0, T, a, b), DomainError);
}

TEST_CASE("total variation of the kernel in t") {
  const auto hc = HurstFunction::constant(0.75);
  CHECK(rel(kernel_total_variation(0.1, 1.0, hc, 2), volterra_kernel(1.0, 0.1, 0.75)) < 1e-14);
  const auto h = HurstFunction::sinusoidal(0.75, 0.15, 2.0 * std::numbers::pi, 0.0);
  const double coarse = kernel_total_variation(0.1, 1.0, h, 16);
  const double fine = kernel_total_variation(0.1, 1.0, h, 256);
  CHECK(fine >= coarse - 1e-8);
  CHECK(fine <= kernel_total_variation_bound(0.1, 1.0, h));
}
