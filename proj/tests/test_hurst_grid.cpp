#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mfvolterra/errors.hpp"
#include "mfvolterra/grid.hpp"
#include "mfvolterra/hurst.hpp"

using namespace mfv;

TEST_CASE("constant shape") {
  const auto h = HurstFunction::constant(0.7);
  CHECK(h(0.0) == 0.7);
  CHECK(h(3.0) == 0.7);
  CHECK(h.derivative(1.0) == 0.0);
  CHECK(h.is_constant());
  CHECK(h.lower() == 0.7);
  CHECK(h.upper() == 0.7);
  CHECK_THROWS_AS(HurstFunction::constant(0.4), DomainError);
  CHECK_THROWS_AS(HurstFunction::constant(1.0), DomainError);
}

TEST_CASE("bound violations cite the admissible interval") {
  try {
    HurstFunction::constant(0.4);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("(1/2,1)") != std::string::npos);
  }
}

TEST_CASE("affine clamped shape") {
  const auto h = HurstFunction::affine_clamped(0.6, 0.5, 0.6, 0.8);
  CHECK(h(0.0) == doctest::Approx(0.6));
  CHECK(h(0.2) == doctest::Approx(0.7));
  CHECK(h(1.0) == doctest::Approx(0.8));
  CHECK(h.derivative(0.2) == doctest::Approx(0.5));
  CHECK(h.derivative(0.9) == 0.0);
  CHECK_THROWS_AS(HurstFunction::affine_clamped(0.6, 0.5, 0.4, 0.8), DomainError);
}

TEST_CASE("sinusoidal shape and derivative") {
  const double w = 2.0 * std::numbers::pi;
  const auto h = HurstFunction::sinusoidal(0.75, 0.15, w, 0.0);
  CHECK(h(0.25) == doctest::Approx(0.9));
  CHECK(h.lower() == doctest::Approx(0.6));
  CHECK(h.upper() == doctest::Approx(0.9));
  for (double t : {0.1, 0.37, 0.8}) {
    const double fd = (h(t + 1e-6) - h(t - 1e-6)) / 2e-6;
    CHECK(h.derivative(t) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK_THROWS_AS(HurstFunction::sinusoidal(0.75, 0.3, w, 0.0), DomainError);
  CHECK_THROWS_AS(HurstFunction::sinusoidal(0.75, 0.15, w, 0.0, 0.65, 0.9), DomainError);
}

TEST_CASE("table shape stays inside its value range") {
  const auto h = HurstFunction::table({0.0, 0.3, 0.6, 1.0}, {0.6, 0.85, 0.7, 0.8});
  CHECK(h(0.3) == doctest::Approx(0.85));
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    lo = std::min(lo, h(i / 1000.0));
    hi = std::max(hi, h(i / 1000.0));
  }
  CHECK(lo >= 0.6 - 1e-15);
  CHECK(hi <= 0.85 + 1e-15);
  CHECK(h.differentiable());
  const auto rough = HurstFunction::table({0.0, 0.3, 0.6, 1.0}, {0.6, 0.85, 0.7, 0.8}, false);
  CHECK_FALSE(rough.differentiable());
  CHECK_THROWS_AS(rough.derivative(0.5), DomainError);
  CHECK_THROWS_AS(HurstFunction::table({0.0, 0.5, 1.0}, {0.6, 0.7, 0.8}), DomainError);
  CHECK_THROWS_AS(HurstFunction::table({0.0, 0.5, 0.5, 1.0}, {0.6, 0.7, 0.7, 0.8}), DomainError);
}

TEST_CASE("custom shape is checked on every evaluation") {
  const auto h = HurstFunction::custom([](double t) { return 0.6 + t; }, {}, 0.6, 0.9, "ramp");
  CHECK(h(0.2) == doctest::Approx(0.8));
  CHECK_THROWS_AS(h(0.5), DomainError);
}

TEST_CASE("variation of h") {
  const auto h = HurstFunction::sinusoidal(0.75, 0.15, 2.0 * std::numbers::pi, 0.0);
  CHECK(h.variation(0.0, 1.0) == doctest::Approx(0.6).epsilon(1e-5));
  CHECK(HurstFunction::constant(0.7).variation(0.0, 1.0) == 0.0);
}

TEST_CASE("time grid") {
  const auto g = TimeGrid::uniform(2.0, 5);
  CHECK(g.size() == 5);
  CHECK(g[0] == 0.0);
  CHECK(g.horizon() == 2.0);
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g.index_of(1.5) == 3);
  CHECK(g.index_of(1.4) == -1);
  CHECK_THROWS_AS(TimeGrid({0.0, 0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(TimeGrid({0.1, 0.5}), DomainError);
}
