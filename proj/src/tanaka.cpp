#include "mfvolterra/tanaka.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfvolterra/covariance.hpp"
#include "mfvolterra/errors.hpp"
#include "mfvolterra/parallel.hpp"
#include "mfvolterra/specfun.hpp"

namespace mfv {

std::string to_string(VarianceConvention c) {
  return c == VarianceConvention::Normalized ? "normalized" : "unnormalized";
}

VarianceConvention variance_convention_from_string(const std::string& name) {
  if (name == "normalized") return VarianceConvention::Normalized;
  if (name == "unnormalized") {
    return VarianceConvention::Unnormalized;
  }
  throw ConfigError("unknown variance convention '" + name + "'");
}

double variance_function(double t, const HurstFunction& h, VarianceConvention c) {
  return c == VarianceConvention::Normalized ? variance(t, h) : variance_unnormalized(t, h);
}

double variance_function_derivative(double t, const HurstFunction& h, VarianceConvention c) {
  return c == VarianceConvention::Normalized ? variance_derivative(t, h)
                                             : variance_unnormalized_derivative(t, h);
}

std::vector<double> variance_step_weights(const TimeGrid& grid, const HurstFunction& h,
                                          VarianceConvention c) {
  if (!h.differentiable()) throw DomainError("dR weights need a differentiable Hurst function");
  std::vector<double> w(grid.size() > 0 ? grid.size() - 1 : 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double tau = i == 0 ? grid[1] : grid[i];
    w[i] = variance_function_derivative(tau, h, c) * (grid[i + 1] - grid[i]);
  }
  return w;
}

namespace {

std::size_t steps_inside(const TimeGrid& grid, double t) {
  const auto times = grid.times();
  const auto n = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) -
                                          times.begin());
  return n == 0 ? 0 : n - 1;
}

std::size_t grid_index(const TimeGrid& grid, double t) {
  const std::ptrdiff_t i = grid.index_of(t);
  if (i < 0) throw DomainError("time " + std::to_string(t) + " is not a grid time");
  return static_cast<std::size_t>(i);
}

std::vector<double> row(const PathEnsemble& ens, Eigen::Index p) {
  std::vector<double> v(static_cast<std::size_t>(ens.n_times()));
  for (Eigen::Index i = 0; i < ens.n_times(); ++i) v[static_cast<std::size_t>(i)] = ens.paths(p, i);
  return v;
}

void mean_and_se(const std::vector<double>& v, double& mean, double& se) {
  const double n = static_cast<double>(v.size());
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / (n - 1.0) / n);
}

void check_ensemble(const PathEnsemble& ens) {
  if (ens.n_paths() < kMinMonteCarloPaths) {
    throw InsufficientSampleError("insufficient sample: Monte Carlo checks need at least " +
                                  std::to_string(kMinMonteCarloPaths) + " paths, got " +
                                  std::to_string(ens.n_paths()));
  }
}

}  // namespace

double smoothed_weighted_occupation(std::span<const double> path, const TimeGrid& grid,
                                    std::span<const double> step_weights, double a, double eps,
                                    double t) {
  if (!(eps > 0.0)) throw DomainError("smoothing variance eps must be positive");
  if (path.size() != grid.size() || step_weights.size() + 1 != grid.size()) {
    throw DomainError("path, grid and step weights have inconsistent sizes");
  }
  const std::size_t n = steps_inside(grid, t);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += gaussian_density(path[i] - a, eps) * step_weights[i];
  return sum;
}

double smoothed_weighted_occupation(std::span<const double> path, const TimeGrid& grid, double a,
                                    double eps, const HurstFunction& h, double t,
                                    VarianceConvention c) {
  const auto w = variance_step_weights(grid, h, c);
  return smoothed_weighted_occupation(path, grid, w, a, eps, t);
}

WeightedLocalTime weighted_local_time(std::span<const double> path, const TimeGrid& grid,
                                      double a, const HurstFunction& h, const Bins& bins,
                                      const std::vector<double>& checkpoints,
                                      VarianceConvention c) {
  if (path.size() != grid.size()) throw DomainError("path length does not match the grid");
  const std::ptrdiff_t bin = bins.locate(a);
  if (bin < 0) throw RangeError("level " + std::to_string(a) + " lies outside the bins");
  const auto w = variance_step_weights(grid, h, c);
  const double width = bins.width(static_cast<std::size_t>(bin));
  WeightedLocalTime out{a, checkpoints, {}, c};
  for (double t : checkpoints) {
    const std::size_t end = grid_index(grid, t);
    double sum = 0.0;
    for (std::size_t i = 0; i < end; ++i) {
      // Increment of the binned local time over step i, weighted by R'(tau_i).
      if (bins.locate(path[i]) == bin) sum += w[i] / width;
    }
    out.values.push_back(sum);
  }
  return out;
}

double tanaka_deterministic(const HurstFunction& h, double a, double eps, double t,
                            const QuadratureSpec& q) {
  if (!(eps >= 0.0)) throw DomainError("eps must be non-negative");
  if (!(t >= 0.0)) throw DomainError("t must be non-negative");
  if (t == 0.0) return 0.0;
  auto f = [&](double s, double) {
    const double var = variance(s, h) + eps;
    if (!(var > 0.0)) return 0.0;
    return gaussian_density(a, var) * variance_derivative(s, h);
  };
  // R'(s) ~ s^{2h - 1} near 0.
  return integrate_left_power(f, 0.0, t, 2.0 * h.lower() - 1.0, q).value;
}

TanakaCheck tanaka_expectation_identity(const PathEnsemble& ens, const HurstFunction& h, double a,
                                        double eps, double t, const QuadratureSpec& q) {
  check_ensemble(ens);
  const TimeGrid& grid = ens.grid;
  grid_index(grid, t);
  const auto w = variance_step_weights(grid, h);
  std::vector<double> values(static_cast<std::size_t>(ens.n_paths()));
  parallel_for(values.size(), [&](std::size_t p) {
    const auto path = row(ens, static_cast<Eigen::Index>(p));
    values[p] = smoothed_weighted_occupation(path, grid, w, a, eps, t);
  });
  TanakaCheck out;
  out.a = a;
  out.eps = eps;
  out.t = t;
  mean_and_se(values, out.mc_mean, out.mc_se);
  out.deterministic = tanaka_deterministic(h, a, eps, t, q);
  const std::size_t n = steps_inside(grid, t);
  for (std::size_t i = 0; i < n; ++i) {
    out.discrete_expectation += w[i] * gaussian_density(a, variance(grid[i], h) + eps);
  }
  out.pass = std::abs(out.mc_mean - out.deterministic) <= 3.0 * out.mc_se;
  return out;
}

TanakaCheck tanaka_expectation_identity(const HurstFunction& h, double a, double eps, double t,
                                        int n_paths, std::uint64_t seed, int grid_points,
                                        const QuadratureSpec& q) {
  if (n_paths < kMinMonteCarloPaths) {
    throw InsufficientSampleError("insufficient sample: Monte Carlo checks need at least " +
                                  std::to_string(kMinMonteCarloPaths) + " paths");
  }
  const TimeGrid grid = TimeGrid::uniform(t, grid_points);
  const CovarianceMethod method =
      h.is_constant() ? CovarianceMethod::FbmClosedForm : CovarianceMethod::GramNodes;
  const PathEnsemble ens = sample_cholesky(grid, h, n_paths, seed, method, q);
  return tanaka_expectation_identity(ens, h, a, eps, t, q);
}

double expected_abs_deviation(double var, double a) {
  if (!(var >= 0.0)) throw DomainError("variance must be non-negative");
  if (var == 0.0) return std::abs(a);
  const double sd = std::sqrt(var);
  return sd * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * a * a / var) +
         a * std::erf(a / (sd * std::numbers::sqrt2));
}

TanakaRemainder tanaka_remainder_check(const PathEnsemble& ens, const HurstFunction& h, double a,
                                       double t, double eps, const QuadratureSpec& q) {
  check_ensemble(ens);
  const TimeGrid& grid = ens.grid;
  const std::size_t it = grid_index(grid, t);
  const auto w = variance_step_weights(grid, h);
  std::vector<double> residual(static_cast<std::size_t>(ens.n_paths()));
  parallel_for(residual.size(), [&](std::size_t p) {
    const auto path = row(ens, static_cast<Eigen::Index>(p));
    const double lhat = smoothed_weighted_occupation(path, grid, w, a, eps, t);
    residual[p] = std::abs(path[it] - a) - std::abs(a) - lhat;
  });
  TanakaRemainder out;
  out.a = a;
  out.t = t;
  mean_and_se(residual, out.mean_residual, out.se);
  const double e_abs = expected_abs_deviation(variance(t, h), a);
  double e_lhat = 0.0;
  for (std::size_t i = 0; i < steps_inside(grid, t); ++i) {
    e_lhat += w[i] * gaussian_density(a, variance(grid[i], h) + eps);
  }
  out.expected = e_abs - std::abs(a) - e_lhat;
  out.continuum_gap = e_abs - std::abs(a) - tanaka_deterministic(h, a, 0.0, t, q);
  out.pass = std::abs(out.mean_residual - out.expected) <= 3.0 * out.se;
  return out;
}

HurstFunction log_reciprocal_hurst(double s, double t) {
  const double e = std::numbers::e;
  if (!(e < s && s < t && t < e * e)) {
    throw DomainError("the log-reciprocal Hurst function needs e < s < t < e^2");
  }
  auto value = [s, t](double u) { return 1.0 / std::log(std::clamp(u, s, t)); };
  auto deriv = [s, t](double u) {
    if (u < s || u > t) return 0.0;
    const double l = std::log(u);
    return -1.0 / (u * l * l);
  };
  return HurstFunction::custom(value, deriv, 1.0 / std::log(t), 1.0 / std::log(s),
                               "log_reciprocal");
}

DegenerateVarianceReport degenerate_variance_case(double s, double t) {
  const HurstFunction h = log_reciprocal_hurst(s, t);
  const double target = std::exp(2.0);
  DegenerateVarianceReport r;
  r.s = s;
  r.t = t;
  constexpr int kPoints = 101;
  constexpr double kStep = 1e-3;
  for (int k = 0; k < kPoints; ++k) {
    const double u = s + (t - s) * k / (kPoints - 1);
    r.max_unnormalized_deviation =
        std::max(r.max_unnormalized_deviation, std::abs(variance_unnormalized(u, h) - target));
    r.max_unnormalized_derivative = std::max(r.max_unnormalized_derivative,
                                             std::abs(variance_unnormalized_derivative(u, h)));
    // One-sided at the ends so the stencil stays inside [s, t].
    const double lo = std::max(s, u - kStep), hi = std::min(t, u + kStep);
    const double fd = (variance_unnormalized(hi, h) - variance_unnormalized(lo, h)) / (hi - lo);
    r.max_unnormalized_derivative = std::max(r.max_unnormalized_derivative, std::abs(fd));
    r.max_normalized_derivative =
        std::max(r.max_normalized_derivative, std::abs(variance_derivative(u, h)));
  }
  r.unnormalized_constant =
      r.max_unnormalized_deviation <= 1e-10 && r.max_unnormalized_derivative <= 1e-10;
  r.normalized_varies = r.max_normalized_derivative > 1e-3;
  return r;
}

}  // namespace mfv
