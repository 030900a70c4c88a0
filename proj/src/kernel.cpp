#include "mfvolterra/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "mfvolterra/errors.hpp"

namespace mfv {
namespace {

void check_hurst(double H, const char* who) {
  if (!(H > 0.5 && H < 1.0)) {
    std::ostringstream os;
    os << who << ": Hurst index must lie in (1/2, 1), got " << H;
    throw DomainError(os.str());
  }
}

void check_args(double t, double u, const char* who) {
  if (!(u > 0.0) || !(u <= t) || !std::isfinite(t)) {
    std::ostringstream os;
    os << who << ": need 0 < u <= t, got t=" << t << ", u=" << u;
    throw DomainError(os.str());
  }
}

}  // namespace

double kernel_segment(double u, double s, double t, double H, const QuadratureSpec& q) {
  if (!(t > s)) return 0.0;
  const double e = H - 0.5;
  const double p = 1.0 / e;
  const double w0 = (s > u) ? std::pow(s - u, e) : 0.0;
  const double w1 = std::pow(t - u, e);
  auto f = [u, p, e](double w) { return p * std::pow(u + std::pow(w, p), e); };
  return integrate(f, w0, w1, q).value;
}

double volterra_kernel(double t, double u, double H, const QuadratureSpec& q) {
  check_hurst(H, "volterra_kernel");
  check_args(t, u, "volterra_kernel");
  if (u == t) return 0.0;
  return std::pow(u, 0.5 - H) * kernel_segment(u, u, t, H, q);
}

double volterra_kernel_gap(double u, double gap, double H, const QuadratureSpec& q) {
  check_hurst(H, "volterra_kernel_gap");
  if (!(u > 0.0) || !(gap >= 0.0)) throw DomainError("volterra_kernel_gap: need u > 0, gap >= 0");
  if (gap == 0.0) return 0.0;
  const double e = H - 0.5;
  const double p = 1.0 / e;
  auto f = [u, p, e](double w) { return p * std::pow(u + std::pow(w, p), e); };
  return std::pow(u, -e) * integrate(f, 0.0, std::pow(gap, e), q).value;
}

double volterra_kernel(double t, double u, const HurstFunction& h, const QuadratureSpec& q) {
  check_args(t, u, "volterra_kernel");
  return volterra_kernel(t, u, h(t), q);
}

double volterra_kernel_dH(double t, double u, double H, const QuadratureSpec& q) {
  check_hurst(H, "volterra_kernel_dH");
  check_args(t, u, "volterra_kernel_dH");
  if (u == t) return 0.0;
  const double e = H - 0.5;
  const double p = 1.0 / e;
  const double w1 = std::pow(t - u, e);
  auto base = [u, p, e](double w) { return p * std::pow(u + std::pow(w, p), e); };
  auto logged = [u, p, e](double w) {
    const double y = u + std::pow(w, p);
    // log(y - u) = p log w
    return p * std::pow(y, e) * (p * std::log(w) + std::log(y));
  };
  const double j0 = integrate(base, 0.0, w1, q).value;
  const double j1 = integrate(logged, 0.0, w1, q).value;
  return std::pow(u, -e) * (-std::log(u) * j0 + j1);
}

double kernel_l2_tail(double s, double t, double H, const QuadratureSpec& q) {
  check_hurst(H, "kernel_l2_tail");
  if (!(s >= 0.0) || !(t >= s)) throw DomainError("kernel_l2_tail: need 0 <= s <= t");
  if (t == s) return 0.0;
  const QuadratureSpec inner = q.tightened(0.01);
  auto k2 = [&](double u) {
    const double k = volterra_kernel(t, u, H, inner);
    return k * k;
  };
  if (s > 0.0) return integrate(k2, s, t, q).value;
  // K^2 ~ u^{1 - 2H} at the origin.
  auto k2_sub = [&](double, double off) { return k2(off); };
  return integrate_left_power(k2_sub, 0.0, t, 1.0 - 2.0 * H, q).value;
}

PhiBound::PhiBound(double a, double b, double horizon, const QuadratureSpec& q)
    : a_(a), b_(b), horizon_(horizon) {
  check_hurst(a, "PhiBound");
  check_hurst(b, "PhiBound");
  if (!(a <= b)) throw DomainError("PhiBound: need a <= b");
  if (!(horizon > 0.0)) throw DomainError("PhiBound: horizon must be positive");
  // Ratio |dK/dl| / envelope at s = T x_s, t = s + (T - s) g.
  auto ratio = [&](double x_s, double g, double lambda) {
    const double s = horizon * x_s;
    const double t = std::min(horizon, s + (horizon - s) * g);
    if (!(t > s)) return 0.0;
    const double envelope = std::max(1.0, std::abs(std::log(s))) * std::pow(s, 0.5 - b);
    return std::abs(volterra_kernel_dH(t, s, lambda, q)) / envelope;
  };
  // The ratio peaks on a ridge with t - s small relative to s, so the gaps are
  // geometric and s covers both the log scale near 0 and the bulk of [0, T].
  std::vector<double> xs, gs, ls;
  for (int k = 0; k < 24; ++k) xs.push_back(std::pow(10.0, -12.0 + 12.0 * k / 24.0) * 0.05);
  for (int k = 0; k < 16; ++k) xs.push_back(0.05 + 0.93 * k / 15.0);
  for (int k = 0; k < 24; ++k) gs.push_back(std::pow(10.0, -10.0 + 10.0 * k / 23.0));
  for (int k = 0; k < (a == b ? 1 : 12); ++k) ls.push_back(a + (b - a) * k / 11.0);

  struct Point {
    double log_x, log_g, lambda, value;
  };
  std::vector<Point> lattice;
  for (double x : xs) {
    for (double g : gs) {
      for (double l : ls) lattice.push_back({std::log(x), std::log(g), l, ratio(x, g, l)});
    }
  }
  std::sort(lattice.begin(), lattice.end(),
            [](const Point& p1, const Point& p2) { return p1.value > p2.value; });
  double worst = lattice.front().value;

  // Compass search from the best lattice points.
  auto eval = [&](Point& p) {
    p.log_x = std::clamp(p.log_x, std::log(1e-12), std::log(1.0 - 1e-9));
    p.log_g = std::clamp(p.log_g, std::log(1e-12), 0.0);
    p.lambda = std::clamp(p.lambda, a, b);
    p.value = ratio(std::exp(p.log_x), std::exp(p.log_g), p.lambda);
  };
  for (std::size_t start = 0; start < std::min<std::size_t>(6, lattice.size()); ++start) {
    Point best = lattice[start];
    double step_x = 0.5, step_g = 0.5, step_l = 0.5 * (b - a) / 11.0;
    for (int round = 0; round < 60 && step_g > 1e-4; ++round) {
      bool moved = false;
      for (int dir = 0; dir < 6; ++dir) {
        Point trial = best;
        const double sign = (dir % 2 == 0) ? 1.0 : -1.0;
        if (dir / 2 == 0) trial.log_x += sign * step_x;
        if (dir / 2 == 1) trial.log_g += sign * step_g;
        if (dir / 2 == 2) trial.lambda += sign * step_l;
        eval(trial);
        if (trial.value > best.value) {
          best = trial;
          moved = true;
        }
      }
      if (!moved) {
        step_x *= 0.5;
        step_g *= 0.5;
        step_l *= 0.5;
      }
    }
    worst = std::max(worst, best.value);
  }
  const double small_s_limit = std::pow(horizon, 2.0 * b - 1.0) / (2.0 * b - 1.0);
  constant_ = 1.1 * std::max(worst, small_s_limit);

  auto phi_sq = [this](double, double s) {
    const double v = (*this)(s);
    return v * v;
  };
  // Phi^2 ~ log(s)^2 s^{1 - 2b}: the power substitution absorbs the algebraic
  // part; the log factor is left to adaptivity.
  QuadratureSpec loose = q;
  loose.rel_tol = std::max(q.rel_tol, 1e-9);
  loose.max_subdivisions = std::max(q.max_subdivisions, 2000);
  l2_norm_sq_ = integrate_left_power(phi_sq, 0.0, horizon, 1.0 - 2.0 * b, loose).value;
}

double PhiBound::operator()(double s) const {
  if (!(s > 0.0)) throw DomainError("phi_bound: s must be positive");
  return constant_ * std::max(1.0, std::abs(std::log(s))) * std::pow(s, 0.5 - b_);
}

const PhiBound& phi_bound_calibration(double a, double b, double horizon) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, double>, std::unique_ptr<PhiBound>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{a, b, horizon}];
  if (!slot) slot = std::make_unique<PhiBound>(a, b, horizon);
  return *slot;
}

double phi_bound(double s, double horizon, double a, double b) {
  if (!(s > 0.0) || !(s <= horizon)) throw DomainError("phi_bound: need 0 < s <= T");
  return phi_bound_calibration(a, b, horizon)(s);
}

double kernel_total_variation(double s, double horizon, const HurstFunction& h, int n,
                              const QuadratureSpec& q) {
  if (!(s > 0.0) || !(horizon > s)) throw DomainError("kernel_total_variation: need 0 < s < T");
  if (n < 2) throw DomainError("kernel_total_variation: need at least 2 partition points");
  double total = 0.0;
  double prev = 0.0;  // K(s, s) = 0
  for (int i = 1; i < n; ++i) {
    const double t = (i == n - 1) ? horizon : s + (horizon - s) * i / (n - 1);
    const double cur = volterra_kernel(t, s, h, q);
    total += std::abs(cur - prev);
    prev = cur;
  }
  return total;
}

double kernel_total_variation_bound(double s, double horizon, const HurstFunction& h,
                                    const QuadratureSpec& q) {
  if (!(s > 0.0) || !(horizon > s)) throw DomainError("kernel_total_variation_bound: need 0 < s < T");
  const double a = h.lower(), b = h.upper();
  double bound = volterra_kernel(horizon, s, a, q);
  if (b != a) bound += volterra_kernel(horizon, s, b, q);
  const double var_h = h.variation(s, horizon);
  if (var_h > 0.0) bound += var_h * phi_bound(s, horizon, a, b);
  return bound;
}

}  // namespace mfv
