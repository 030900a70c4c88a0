#pragma once

// Global adaptive Gauss-Kronrod (10/21) integration with caller-supplied
// breakpoints. Panels are bisected largest-error-first until the summed error
// estimate meets max(abs_tol, rel_tol * |I|) or the subdivision budget runs out.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mfvolterra/errors.hpp"

namespace mfv {

struct QuadratureSpec {
  double abs_tol = 1e-14;
  double rel_tol = 1e-11;
  int max_subdivisions = 400;

  void validate() const;

  /// Tolerances scaled by `factor` (floored at 1e-16), same budget. Used for
  /// the inner integral of nested quadratures.
  QuadratureSpec tightened(double factor) const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

namespace detail {

struct GK21 {
  std::array<double, 11> x{};   // x[0] = 0, ascending
  std::array<double, 11> wk{};  // Kronrod weights
  std::array<double, 5> wg{};   // Gauss weights for x[1], x[3], ..., x[9]
};

const GK21& gk21();

struct Panel {
  double a, b, value, error, l1;
};

template <class F>
Panel gk21_panel(F& f, double a, double b) {
  const GK21& r = gk21();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = r.wk[0] * fc;
  double gauss = 0.0;
  double l1 = r.wk[0] * std::abs(fc);
  for (int i = 1; i <= 10; ++i) {
    const double dx = h * r.x[i];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kron += r.wk[i] * (f1 + f2);
    l1 += r.wk[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) gauss += r.wg[i / 2] * (f1 + f2);
  }
  return Panel{a, b, kron * h, std::abs((kron - gauss) * h), l1 * std::abs(h)};
}

[[noreturn]] void throw_tolerance(double value, double error, double target, int panels);

}  // namespace detail

/// Fixed Gauss-Legendre rule on [0, 1], ascending nodes. n in {16, 24, 32}.
struct FixedRule {
  std::vector<double> x;
  std::vector<double> w;
};
const FixedRule& gauss_legendre_unit(int n);

/// Integrate f over [points.front(), points.back()] with the interior points as
/// initial panel boundaries. Throws ToleranceError when the budget is exhausted.
template <class F>
QuadResult integrate(F&& f, std::span<const double> points, const QuadratureSpec& spec) {
  using detail::Panel;
  if (points.size() < 2) return {};
  std::vector<Panel> heap;
  heap.reserve(static_cast<std::size_t>(std::max<std::ptrdiff_t>(
      16, static_cast<std::ptrdiff_t>(points.size()) + 8)));
  auto by_error = [](const Panel& p, const Panel& q) { return p.error < q.error; };
  double total = 0.0, err = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    heap.push_back(detail::gk21_panel(f, points[i], points[i + 1]));
    total += heap.back().value;
    err += heap.back().error;
    l1 += heap.back().l1;
  }
  std::make_heap(heap.begin(), heap.end(), by_error);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (err > target() && err > 50.0 * eps * l1) {
    if (static_cast<int>(heap.size()) >= spec.max_subdivisions) {
      detail::throw_tolerance(total, err, target(), static_cast<int>(heap.size()));
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      detail::throw_tolerance(total, err, target(), static_cast<int>(heap.size()));
    }
    const Panel left = detail::gk21_panel(f, worst.a, mid);
    const Panel right = detail::gk21_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  // Re-sum in a fixed order so the result does not carry update drift.
  std::sort(heap.begin(), heap.end(), [](const Panel& p, const Panel& q) { return p.a < q.a; });
  QuadResult out;
  for (const Panel& p : heap) {
    out.value += p.value;
    out.error += p.error;
  }
  out.panels = static_cast<int>(heap.size());
  return out;
}

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSpec& spec) {
  const std::array<double, 2> pts{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts), spec);
}

/// Integral over [a, b] of an integrand behaving like (x - a)^alpha, alpha > -1,
/// near the left end. Uses x = a + (b - a) r^m with m = 1 / (alpha + 1) and hands
/// `f(x, x - a)` the offset separately so it is never formed by cancellation.
template <class F>
QuadResult integrate_left_power(F&& f, double a, double b, double alpha,
                                const QuadratureSpec& spec) {
  if (!(b > a)) return {};
  const double m = 1.0 / (alpha + 1.0);
  const double width = b - a;
  auto g = [&](double r) {
    const double rm = std::pow(r, m);
    const double off = width * rm;
    return f(a + off, off) * width * m * rm / r;
  };
  return integrate(g, 0.0, 1.0, spec);
}

/// Mirror of integrate_left_power for an integrand behaving like (b - x)^alpha near
/// the right end; f receives (x, b - x).
template <class F>
QuadResult integrate_right_power(F&& f, double a, double b, double alpha,
                                 const QuadratureSpec& spec) {
  if (!(b > a)) return {};
  const double m = 1.0 / (alpha + 1.0);
  const double width = b - a;
  auto g = [&](double r) {
    const double rm = std::pow(r, m);
    const double off = width * rm;
    return f(b - off, off) * width * m * rm / r;
  };
  return integrate(g, 0.0, 1.0, spec);
}

}  // namespace mfv
