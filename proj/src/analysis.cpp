#include "mfvolterra/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "mfvolterra/covariance.hpp"
#include "mfvolterra/errors.hpp"
#include "mfvolterra/kernel.hpp"
#include "mfvolterra/parallel.hpp"
#include "mfvolterra/specfun.hpp"

namespace mfv {

// ---------------------------------------------------------------- bins

Bins::Bins(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw DomainError("Bins: need at least two edges");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) throw DomainError("Bins: edges must be strictly increasing");
  }
}

Bins Bins::uniform(double lo, double hi, int count) {
  if (count < 1 || !(hi > lo)) throw DomainError("Bins::uniform: need count >= 1 and hi > lo");
  std::vector<double> e(static_cast<std::size_t>(count) + 1);
  for (int k = 0; k <= count; ++k) e[k] = lo + (hi - lo) * k / count;
  e.back() = hi;
  return Bins(std::move(e));
}

Bins Bins::with_width(std::span<const double> values, double width) {
  if (values.empty()) throw DomainError("Bins: no values");
  if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("Bins: width must be positive");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn - 0.5 * width;
  const auto count = static_cast<std::size_t>(std::floor((*mx - lo) / width)) + 1;
  std::vector<double> e(count + 1);
  for (std::size_t k = 0; k <= count; ++k) e[k] = lo + width * static_cast<double>(k);
  return Bins(std::move(e));
}

Bins Bins::freedman_diaconis(std::span<const double> values) {
  if (values.empty()) throw DomainError("Bins: no values");
  std::vector<double> v(values.begin(), values.end());
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  double width = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(v.size()));
  if (!(width > 0.0)) {
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    width = (*mx > *mn) ? (*mx - *mn) / 8.0 : 1.0;
  }
  return with_width(values, width);
}

std::ptrdiff_t Bins::locate(double x) const {
  if (!(x >= edges_.front()) || !(x <= edges_.back())) return -1;
  if (x == edges_.back()) return static_cast<std::ptrdiff_t>(count()) - 1;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  return static_cast<std::ptrdiff_t>(it - edges_.begin()) - 1;
}

// ---------------------------------------------------------- local time

namespace {

void check_path(std::span<const double> path, const TimeGrid& grid) {
  if (path.size() != grid.size()) throw DomainError("path length does not match the grid");
}

// Index m with grid[m] == t, or DomainError.
std::size_t checkpoint_index(const TimeGrid& grid, double t) {
  const std::ptrdiff_t m = grid.index_of(t);
  if (m < 0) throw DomainError("checkpoint " + std::to_string(t) + " is not a grid time");
  return static_cast<std::size_t>(m);
}

// Number of steps [t_i, t_{i+1}] contained in [0, t].
std::size_t steps_before(const TimeGrid& grid, double t) {
  const auto times = grid.times();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto n = static_cast<std::size_t>(it - times.begin());
  return n == 0 ? 0 : n - 1;
}

}  // namespace

double gaussian_density(double x, double eps) {
  return std::exp(-0.5 * x * x / eps) / std::sqrt(2.0 * std::numbers::pi * eps);
}

LocalTimeEstimate local_time_binned(std::span<const double> path, const TimeGrid& grid,
                                    const Bins& bins, const std::vector<double>& checkpoints) {
  check_path(path, grid);
  std::vector<std::size_t> idx;
  for (double t : checkpoints) idx.push_back(checkpoint_index(grid, t));
  if (!std::is_sorted(idx.begin(), idx.end())) throw DomainError("checkpoints must be increasing");
  const std::size_t last = idx.empty() ? 0 : idx.back();

  LocalTimeEstimate out{bins, checkpoints,
                        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(checkpoints.size()),
                                              static_cast<Eigen::Index>(bins.count())),
                        0.0, LocalTimeEstimator::Binned};
  Eigen::VectorXd occupation = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bins.count()));
  std::size_t next = 0;
  for (std::size_t i = 0; i <= last; ++i) {
    while (next < idx.size() && idx[next] == i) {
      for (std::size_t k = 0; k < bins.count(); ++k) {
        out.density(static_cast<Eigen::Index>(next), static_cast<Eigen::Index>(k)) =
            occupation(static_cast<Eigen::Index>(k)) / bins.width(k);
      }
      ++next;
    }
    if (i == last) break;
    const std::ptrdiff_t k = bins.locate(path[i]);
    if (k < 0) {
      throw RangeError("path value " + std::to_string(path[i]) + " at t=" +
                       std::to_string(grid[i]) + " lies outside the bins");
    }
    occupation(k) += grid[i + 1] - grid[i];
  }
  return out;
}

double local_time_kernel(std::span<const double> path, const TimeGrid& grid, double x, double t,
                         double eps) {
  check_path(path, grid);
  if (!(eps > 0.0)) throw DomainError("local_time_kernel: eps must be positive");
  const std::size_t n = steps_before(grid, t);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += (grid[i + 1] - grid[i]) * gaussian_density(path[i] - x, eps);
  }
  return sum;
}

LocalTimeEstimate local_time_kernel_field(std::span<const double> path, const TimeGrid& grid,
                                          const Bins& bins,
                                          const std::vector<double>& checkpoints, double eps) {
  LocalTimeEstimate out{bins, checkpoints,
                        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(checkpoints.size()),
                                              static_cast<Eigen::Index>(bins.count())),
                        eps, LocalTimeEstimator::KernelSmoothed};
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    for (std::size_t k = 0; k < bins.count(); ++k) {
      out.density(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) =
          local_time_kernel(path, grid, bins.center(k), checkpoints[c], eps);
    }
  }
  return out;
}

double occupation_identity_residual(std::span<const double> path, const TimeGrid& grid,
                                    const std::function<double(double)>& g, const Bins& bins) {
  check_path(path, grid);
  const LocalTimeEstimate lt = local_time_binned(path, grid, bins, {grid.horizon()});
  double direct = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) direct += (grid[i + 1] - grid[i]) * g(path[i]);
  double via_density = 0.0;
  for (std::size_t k = 0; k < bins.count(); ++k) {
    via_density += g(bins.center(k)) * lt.density(0, static_cast<Eigen::Index>(k)) * bins.width(k);
  }
  return std::abs(direct - via_density);
}

double occupation_identity_residual_bin(std::span<const double> path, const TimeGrid& grid,
                                        const Bins& bins, std::size_t k) {
  if (k >= bins.count()) throw RangeError("bin index out of range");
  const auto target = static_cast<std::ptrdiff_t>(k);
  return occupation_identity_residual(
      path, grid, [&](double x) { return bins.locate(x) == target ? 1.0 : 0.0; }, bins);
}

void write_csv(const LocalTimeEstimate& lt, std::ostream& out) {
  const auto old = out.precision(17);
  out << 't';
  for (std::size_t k = 0; k < lt.bins.count(); ++k) {
    out << ",bin_" << lt.bins.edges()[k] << '_' << lt.bins.edges()[k + 1];
  }
  out << '\n';
  for (std::size_t c = 0; c < lt.checkpoints.size(); ++c) {
    out << lt.checkpoints[c];
    for (Eigen::Index k = 0; k < lt.density.cols(); ++k) {
      out << ',' << lt.density(static_cast<Eigen::Index>(c), k);
    }
    out << '\n';
  }
  out.precision(old);
}

// ------------------------------------------------------------------ Berman

double berman_fbm_exact(double H, double horizon) {
  return 2.0 * std::sqrt(c_lambda_sq(H)) * std::pow(horizon, 2.0 - H) / ((1.0 - H) * (2.0 - H));
}

namespace {

// Integral over two unit cells k apart of |x - y|^{-alpha}: second difference of
// |x|^{2-alpha} / ((1-alpha)(2-alpha)).
double cell_pair_weight(int k, double alpha) {
  const double e = 2.0 - alpha;
  const double norm = (1.0 - alpha) * (2.0 - alpha);
  if (k == 0) return 2.0 / norm;
  const double kk = k;
  return (std::pow(kk + 1.0, e) - 2.0 * std::pow(kk, e) + std::pow(kk - 1.0, e)) / norm;
}

double berman_product_rule(const HurstFunction& h, double horizon, int n,
                           const QuadratureSpec& q) {
  const double dx = horizon / n;
  std::vector<double> times{0.0};
  for (int i = 0; i < n; ++i) times.push_back((i + 0.5) * dx);
  const TimeGrid grid(times);
  const Eigen::MatrixXd cov = gram_covariance(grid, h, q);
  std::vector<double> lam(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) lam[static_cast<std::size_t>(i)] = h(times[static_cast<std::size_t>(i) + 1]);

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = lam[static_cast<std::size_t>(i)];
    total += std::sqrt(c_lambda_sq(a)) * std::pow(dx, 2.0 - a) * cell_pair_weight(0, a);
    for (int j = 0; j < i; ++j) {
      const Eigen::Index ii = i + 1, jj = j + 1;
      const double m2 = cov(ii, ii) + cov(jj, jj) - 2.0 * cov(ii, jj);
      if (!(m2 > 0.0)) throw NumericalError("non-positive increment variance in Berman integral");
      const double sep = (i - j) * dx;
      const double rho = std::pow(sep, a) / std::sqrt(m2);
      total += 2.0 * rho * std::pow(dx, 2.0 - a) * cell_pair_weight(i - j, a);
    }
  }
  return total;
}

}  // namespace

BermanResult berman_integral(const HurstFunction& h, double horizon, int n,
                             const QuadratureSpec& q) {
  if (n < 16) throw DomainError("berman_integral: need n >= 16");
  if (!(horizon >= 0.0)) throw DomainError("berman_integral: horizon must be non-negative");
  if (horizon == 0.0) return {};
  BermanResult r;
  r.value = berman_product_rule(h, horizon, n, q);
  r.coarse = berman_product_rule(h, horizon, n / 2, q);
  r.relative_change = std::abs(r.value - r.coarse) / r.coarse;
  if (r.value > 1.1 * r.coarse) {
    throw NumericalError("Berman integral grew by more than 10% under refinement: " +
                         std::to_string(r.coarse) + " -> " + std::to_string(r.value));
  }
  return r;
}

// ---------------------------------------------------- Hoelder and lass

std::vector<double> log_space(double lo, double hi, int n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw DomainError("log_space: need 0 < lo < hi, n >= 2");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  v.back() = hi;
  return v;
}

ScalingFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InsufficientSampleError("log-log fit needs at least two points");
  }
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 1e-300)) throw DomainError("log-log fit: regression is degenerate (scales coincide)");
  ScalingFit fit;
  fit.exponent = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (my + fit.exponent * (lx[i] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.scales = x;
  fit.statistics = y;
  return fit;
}

HolderReport holder_exponent(double t0, const HurstFunction& h, const std::vector<double>& eps,
                             const QuadratureSpec& q) {
  if (eps.size() < 5) throw DomainError("holder_exponent: need at least 5 scales");
  for (double e : eps) {
    if (!(e > 0.0 && e < 1.0)) throw DomainError("holder_exponent: scales must lie in (0,1)");
  }
  if (!(t0 >= 0.0)) throw DomainError("holder_exponent: t0 must be non-negative");
  std::vector<double> m2(eps.size());
  parallel_for(eps.size(), [&](std::size_t i) {
    m2[i] = increment_second_moment(t0, t0 + eps[i], h, q);
  });
  const ScalingFit fit = log_log_fit(eps, m2);
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  return HolderReport{t0, 0.5 * fit.exponent, *lo, *hi, 0.5 * fit.residual};
}

LassPair lass_covariance_limit(double t0, double eps, double u, double v, const HurstFunction& h,
                               const QuadratureSpec& q) {
  if (!(t0 > 0.0) || !(eps > 0.0) || !(u >= 0.0) || !(v >= 0.0)) {
    throw DomainError("lass_covariance_limit: need t0 > 0, eps > 0, u, v >= 0");
  }
  const double H = h(t0);
  const double a = t0 + eps * u, b = t0 + eps * v;
  // Polarization: E[(B(a)-B(t0))(B(b)-B(t0))] = (m2(t0,a) + m2(t0,b) - m2(a,b)) / 2.
  const double cov = 0.5 * (increment_second_moment(t0, a, h, q) +
                            increment_second_moment(t0, b, h, q) -
                            increment_second_moment(std::min(a, b), std::max(a, b), h, q));
  LassPair out;
  out.rescaled = cov * std::pow(eps, -2.0 * H);
  out.limit = 0.5 * c_lambda_inv_sq(H) *
              (std::pow(u, 2.0 * H) + std::pow(v, 2.0 * H) - std::pow(std::abs(u - v), 2.0 * H));
  return out;
}

// --------------------------------------------------------------------- LND

namespace {

void check_times(const std::vector<double>& times) {
  if (times.size() < 2) throw DomainError("LND: need at least two times");
  if (!(times.front() > 0.0)) throw DomainError("LND: times must be positive");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw DomainError("LND: times must be strictly increasing");
  }
}

// Jittered Cholesky with the simulate-module escalation policy.
Eigen::LLT<Eigen::MatrixXd> factor_with_jitter(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  const double max_diag = m.diagonal().maxCoeff();
  for (double rel = 1e-14; rel <= 1e-8 * (1.0 + 1e-9); rel *= 10.0) {
    Eigen::MatrixXd shifted = m;
    shifted.diagonal().array() += rel * max_diag;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw NumericalError("conditioning block is singular beyond the jitter policy");
}

}  // namespace

Eigen::MatrixXd increment_covariance(const std::vector<double>& times, const HurstFunction& h,
                                     const QuadratureSpec& q) {
  check_times(times);
  const std::size_t m = times.size();
  std::vector<double> t{0.0};
  t.insert(t.end(), times.begin(), times.end());
  // m2[a][b] = E[(B(t_b) - B(t_a))^2] for a < b.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t b = 1; b <= m; ++b) {
    for (std::size_t a = 0; a < b; ++a) pairs.emplace_back(a, b);
  }
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + 1),
                                             static_cast<Eigen::Index>(m + 1));
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto [a, b] = pairs[k];
    const double v = increment_second_moment(t[a], t[b], h, q);
    m2(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
    m2(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
  });
  Eigen::MatrixXd c(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 1; i <= static_cast<Eigen::Index>(m); ++i) {
    for (Eigen::Index j = 1; j <= static_cast<Eigen::Index>(m); ++j) {
      // Cov(B(b)-B(a), B(d)-B(c)) = (m2(a,d) + m2(b,c) - m2(a,c) - m2(b,d)) / 2
      c(i - 1, j - 1) =
          0.5 * (m2(i - 1, j) + m2(i, j - 1) - m2(i - 1, j - 1) - m2(i, j));
    }
  }
  return c;
}

double lnd_ratio(const Eigen::MatrixXd& cov) {
  const Eigen::Index m = cov.rows();
  if (m < 2 || cov.cols() != m) throw DomainError("lnd_ratio: need a square matrix of size >= 2");
  const double var = cov(m - 1, m - 1);
  if (!(var > 0.0)) throw NumericalError("lnd_ratio: increment variance is not positive");
  const Eigen::MatrixXd past = cov.topLeftCorner(m - 1, m - 1);
  const Eigen::VectorXd cross = cov.col(m - 1).head(m - 1);
  const auto llt = factor_with_jitter(past);
  const double explained = cross.dot(llt.solve(cross));
  return std::clamp((var - explained) / var, 0.0, 1.0);
}

double lnd_ratio(const std::vector<double>& times, const HurstFunction& h,
                 const QuadratureSpec& q) {
  return lnd_ratio(increment_covariance(times, h, q));
}

double lnd_whole_past_bound(const std::vector<double>& times, const HurstFunction& h,
                            const QuadratureSpec& q) {
  check_times(times);
  const double tm = times.back(), tp = times[times.size() - 2];
  return kernel_l2_tail(tp, tm, h(tm), q) / increment_second_moment(tp, tm, h, q);
}

double lnd_quadratic_form_margin(const Eigen::MatrixXd& cov) {
  const Eigen::VectorXd d = cov.diagonal();
  if ((d.array() <= 0.0).any()) throw NumericalError("increment variances must be positive");
  const Eigen::VectorXd s = d.array().rsqrt();
  const Eigen::MatrixXd corr = s.asDiagonal() * cov * s.asDiagonal();
  return std::max(0.0, min_eigenvalue(corr));
}

double lnd_quadratic_form_margin(const std::vector<double>& times, const HurstFunction& h,
                                 const QuadratureSpec& q) {
  return lnd_quadratic_form_margin(increment_covariance(times, h, q));
}

double lnd_tail_integral(double psi, double a, double b, const QuadratureSpec& q) {
  if (!(0.5 < a && a < b && b < 1.0)) throw DomainError("need 1/2 < a < b < 1");
  if (!(psi >= 1.0)) throw DomainError("tail integral needs psi >= 1");
  // v = 1 / (1 - w): integrand w^{1-2b} (1-w)^{2b-a-3/2} on [1 - 1/psi, 1).
  const double lo = 1.0 - 1.0 / psi;
  const double e_right = 2.0 * b - a - 1.5;
  auto f = [&](double w, double gap) { return std::pow(w, 1.0 - 2.0 * b) * std::pow(gap, e_right); };
  if (lo == 0.0) {
    return integrate_left_power([&](double w, double) { return f(w, 1.0 - w); }, 0.0, 0.5,
                                1.0 - 2.0 * b, q).value +
           integrate_right_power(f, 0.5, 1.0, e_right, q).value;
  }
  return integrate_right_power(f, lo, 1.0, e_right, q).value;
}

double lnd_integral_lower_bound(double a, double b, const QuadratureSpec& q) {
  if (!(0.5 < a && a < b && b < 1.0)) throw DomainError("need 1/2 < a < b < 1");
  const QuadratureSpec qi = q.tightened(0.1);
  auto f = [&](double r, double) {
    return std::pow(1.0 - r, 2.0 * b - 2.0) * lnd_tail_integral(1.0 / r, a, b, qi);
  };
  // G(1/r) ~ r^{2b-a-1/2} near r = 0; above r = 1/2 the argument is pinned at 2.
  const double inner = integrate_left_power(f, 0.0, 0.5, 2.0 * b - a - 0.5, q).value;
  const double flat = lnd_tail_integral(2.0, a, b, qi) * std::pow(0.5, 2.0 * b - 1.0) / (2.0 * b - 1.0);
  return (inner + flat) / b;
}

// --------------------------------------------------- regularity scaling

double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw InsufficientSampleError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0,1]");
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

RegularityReport regularity_scaling(const PathEnsemble& ens, double hurst,
                                    const RegularityConfig& config) {
  if (ens.n_paths() < config.min_paths) {
    throw InsufficientSampleError("regularity_scaling: need at least " +
                                  std::to_string(config.min_paths) + " paths");
  }
  if (ens.n_times() < config.min_points) {
    throw InsufficientSampleError("regularity_scaling: need at least " +
                                  std::to_string(config.min_points) + " grid points");
  }
  const auto n_paths = static_cast<std::size_t>(ens.n_paths());
  const auto n_times = static_cast<std::size_t>(ens.n_times());
  const TimeGrid& grid = ens.grid;
  auto path_of = [&](std::size_t p) {
    std::vector<double> v(n_times);
    for (std::size_t i = 0; i < n_times; ++i) {
      v[i] = ens.paths(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i));
    }
    return v;
  };

  // Space: common bin width d0 = 4 x median one-step move; spacings d0 2^k up to
  // half the median interquartile range of the path values.
  std::vector<double> steps, iqrs;
  for (std::size_t p = 0; p < n_paths; ++p) {
    const auto v = path_of(p);
    for (std::size_t i = 1; i < n_times; i += 7) steps.push_back(std::abs(v[i] - v[i - 1]));
    iqrs.push_back(quantile(v, 0.75) - quantile(v, 0.25));
  }
  const double d0 = 4.0 * quantile(steps, 0.5);
  const double d_max = 0.5 * quantile(iqrs, 0.5);
  std::vector<int> shifts;
  for (int s = 1; d0 * s <= d_max; s *= 2) shifts.push_back(s);
  if (static_cast<int>(shifts.size()) < config.min_scales) {
    throw InsufficientSampleError("regularity_scaling: fewer than " +
                                  std::to_string(config.min_scales) + " spatial scales resolvable");
  }
  std::vector<std::vector<double>> space_stat(shifts.size(), std::vector<double>(n_paths));
  parallel_for(n_paths, [&](std::size_t p) {
    const auto v = path_of(p);
    const Bins bins = Bins::with_width(v, d0);
    const auto lt = local_time_binned(v, grid, bins, {grid.horizon()});
    const double q25 = quantile(v, 0.25), q75 = quantile(v, 0.75);
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      double sum = 0.0;
      int count = 0;
      for (std::size_t k = 0; k + static_cast<std::size_t>(shifts[s]) < bins.count(); ++k) {
        const double x = bins.center(k);
        if (x < q25 || x > q75) continue;
        sum += std::abs(lt.density(0, static_cast<Eigen::Index>(k + shifts[s])) -
                        lt.density(0, static_cast<Eigen::Index>(k)));
        ++count;
      }
      space_stat[s][p] = count > 0 ? sum / count : 0.0;
    }
  });
  std::vector<double> spacing, space_median;
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    spacing.push_back(d0 * shifts[s]);
    space_median.push_back(quantile(space_stat[s], 0.5));
  }

  // Time: intervals [0, T 2^-k] with at least 32 steps; Freedman-Diaconis bins per
  // interval and path.
  std::vector<double> lengths;
  std::vector<std::size_t> ends;
  for (int k = 0; k < config.time_scales; ++k) {
    const double len = grid.horizon() * std::ldexp(1.0, -k);
    const std::size_t end = steps_before(grid, len * (1.0 + 1e-12));
    if (end < 32) break;
    lengths.push_back(grid[end]);
    ends.push_back(end);
  }
  if (static_cast<int>(lengths.size()) < config.min_scales) {
    throw InsufficientSampleError("regularity_scaling: fewer than " +
                                  std::to_string(config.min_scales) + " time scales resolvable");
  }
  std::vector<std::vector<double>> time_stat(lengths.size(), std::vector<double>(n_paths));
  parallel_for(n_paths, [&](std::size_t p) {
    const auto v = path_of(p);
    for (std::size_t k = 0; k < lengths.size(); ++k) {
      const std::span<const double> used(v.data(), ends[k]);
      const Bins bins = Bins::freedman_diaconis(used);
      const auto lt = local_time_binned(v, grid, bins, {lengths[k]});
      time_stat[k][p] = lt.density.maxCoeff();
    }
  });
  std::vector<double> time_median;
  for (auto& s : time_stat) time_median.push_back(quantile(s, 0.5));

  RegularityReport out;
  out.space = log_log_fit(spacing, space_median);
  out.time = log_log_fit(lengths, time_median);
  out.hurst = hurst;
  return out;
}

}  // namespace mfv
