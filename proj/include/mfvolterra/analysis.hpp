#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mfvolterra/grid.hpp"
#include "mfvolterra/hurst.hpp"
#include "mfvolterra/quadrature.hpp"
#include "mfvolterra/simulate.hpp"

namespace mfv {

// ---------------------------------------------------------------- local time

/// Spatial bins given by strictly increasing edges; bin k is [e_k, e_{k+1}), the
/// last bin is closed.
class Bins {
 public:
  explicit Bins(std::vector<double> edges);
  static Bins uniform(double lo, double hi, int count);
  /// Width 2 IQR n^{-1/3} (Freedman-Diaconis), aligned so the values' range sits
  /// strictly inside the edges.
  static Bins freedman_diaconis(std::span<const double> values);
  /// Given width, aligned as above.
  static Bins with_width(std::span<const double> values, double width);

  std::size_t count() const { return edges_.size() - 1; }
  const std::vector<double>& edges() const { return edges_; }
  double width(std::size_t k) const { return edges_[k + 1] - edges_[k]; }
  double center(std::size_t k) const { return 0.5 * (edges_[k] + edges_[k + 1]); }
  /// Bin index of x, or -1 outside the edges.
  std::ptrdiff_t locate(double x) const;

 private:
  std::vector<double> edges_;
};

enum class LocalTimeEstimator { Binned, KernelSmoothed };

struct LocalTimeEstimate {
  Bins bins;
  std::vector<double> checkpoints;
  Eigen::MatrixXd density;  ///< checkpoints x bins, time per unit space
  double bandwidth = 0.0;   ///< variance of the Gaussian kernel; 0 for binned
  LocalTimeEstimator estimator = LocalTimeEstimator::Binned;
};

/// L(t, k) = (1 / width_k) * sum over steps [t_i, t_{i+1}] inside [0, t] of
/// (t_{i+1} - t_i) 1{B(t_i) in bin k}. Checkpoints must be grid times. Throws
/// RangeError when a path value used by a sum lies outside the bins.
LocalTimeEstimate local_time_binned(std::span<const double> path, const TimeGrid& grid,
                                    const Bins& bins, const std::vector<double>& checkpoints);

/// sum over steps inside [0, t] of (t_{i+1} - t_i) p_eps(B(t_i) - x), p_eps the centered
/// Gaussian density with variance eps.
double local_time_kernel(std::span<const double> path, const TimeGrid& grid, double x,
                         double t, double eps);

/// Kernel-smoothed field evaluated at the bin centers.
LocalTimeEstimate local_time_kernel_field(std::span<const double> path, const TimeGrid& grid,
                                          const Bins& bins,
                                          const std::vector<double>& checkpoints, double eps);

/// |sum_i (t_{i+1} - t_i) g(B(t_i)) - sum_k g(center_k) L(T, k) width_k|.
double occupation_identity_residual(std::span<const double> path, const TimeGrid& grid,
                                    const std::function<double(double)>& g, const Bins& bins);

/// Same, with g the indicator of bin k (evaluated exactly on both sides).
double occupation_identity_residual_bin(std::span<const double> path, const TimeGrid& grid,
                                        const Bins& bins, std::size_t k);

/// CSV: header "t,bin_<lo>_<hi>,...", one row per checkpoint.
void write_csv(const LocalTimeEstimate& lt, std::ostream& out);

/// Gaussian density with variance eps.
double gaussian_density(double x, double eps);

// ------------------------------------------------------------------ Berman

struct BermanResult {
  double value = 0.0;    ///< at n cells per side
  double coarse = 0.0;   ///< at n / 2 cells per side
  double relative_change = 0.0;
};

/// Integral over [0, T]^2 of ds dt / sqrt(E[(B(t) - B(s))^2]) by product integration
/// on n x n cells: the smooth factor |t - s|^alpha / sqrt(m2) (alpha = h at the later
/// cell midpoint) is taken at the cell midpoints and |t - s|^{-alpha} is integrated
/// exactly over each cell; on diagonal cells the factor is its limit c_{h}.
/// Throws NumericalError when the value grows by more than 10% from n / 2 to n.
BermanResult berman_integral(const HurstFunction& h, double horizon, int n,
                             const QuadratureSpec& q = {});

/// 2 c_H T^{2-H} / ((1 - H)(2 - H)), the constant-h value.
double berman_fbm_exact(double H, double horizon);

// -------------------------------------------------------- Hoelder and lass

struct HolderReport {
  double t0 = 0.0;
  double estimate = 0.0;
  double eps_min = 0.0;
  double eps_max = 0.0;
  double residual = 0.0;  ///< RMS residual of the log-log fit
};

/// Half the least-squares slope of log E[(B(t0 + eps) - B(t0))^2] against log eps.
HolderReport holder_exponent(double t0, const HurstFunction& h, const std::vector<double>& eps,
                             const QuadratureSpec& q = {});

/// n log-spaced values in [lo, hi].
std::vector<double> log_space(double lo, double hi, int n);

struct LassPair {
  double rescaled = 0.0;
  double limit = 0.0;
};

/// eps^{-2h(t0)} E[(B(t0+eps u) - B(t0))(B(t0+eps v) - B(t0))] and its fBm limit
/// c^-2 (u^{2h} + v^{2h} - |u - v|^{2h}) / 2, h = h(t0).
LassPair lass_covariance_limit(double t0, double eps, double u, double v, const HurstFunction& h,
                               const QuadratureSpec& q = {});

// --------------------------------------------------------------------- LND

/// Covariance of the increments D_1 = B(t_1), D_j = B(t_j) - B(t_{j-1}), from exact
/// second moments of increments.
Eigen::MatrixXd increment_covariance(const std::vector<double>& times, const HurstFunction& h,
                                     const QuadratureSpec& q = {});

/// Var[B(t_m) - B(t_{m-1}) | B(t_1), ..., B(t_{m-1})] / Var[B(t_m) - B(t_{m-1})].
double lnd_ratio(const std::vector<double>& times, const HurstFunction& h,
                 const QuadratureSpec& q = {});
double lnd_ratio(const Eigen::MatrixXd& increment_cov);

/// (integral over [t_{m-1}, t_m] of K_{h(t_m)}(t_m, u)^2 du) / Var[B(t_m) - B(t_{m-1})].
double lnd_whole_past_bound(const std::vector<double>& times, const HurstFunction& h,
                            const QuadratureSpec& q = {});

/// Smallest generalized eigenvalue of (increment covariance, its diagonal).
double lnd_quadratic_form_margin(const std::vector<double>& times, const HurstFunction& h,
                                 const QuadratureSpec& q = {});
double lnd_quadratic_form_margin(const Eigen::MatrixXd& increment_cov);

/// Tail integral of (v - 1)^{1-2b} v^{a-3/2} over [psi, inf), psi >= 1.
double lnd_tail_integral(double psi, double a, double b, const QuadratureSpec& q = {});

/// Double integral over [0,1]^2 of |y - z|^{2b-2} G(max(y/z, z/y, 2)), G the tail
/// integral above. Reduced by symmetry and z = r y to
///   (1/b) integral_0^1 (1 - r)^{2b-2} G(max(1/r, 2)) dr.
double lnd_integral_lower_bound(double a, double b, const QuadratureSpec& q = {});

// --------------------------------------------------- regularity scaling

struct ScalingFit {
  double exponent = 0.0;
  double residual = 0.0;
  std::vector<double> scales;
  std::vector<double> statistics;
};

struct RegularityReport {
  ScalingFit space;  ///< median over paths of mean_x |L(I, x + d) - L(I, x)| against d
  ScalingFit time;   ///< median over paths of sup_x L(I, x) against |I|
  double hurst = 0.0;
};

struct RegularityConfig {
  int min_paths = 500;
  int min_points = 4096;
  int min_scales = 4;
  int time_scales = 7;  ///< intervals [0, T 2^-k], k = 0..time_scales-1
};

/// Empirical space and time exponents of the local time (see RegularityReport).
/// Throws InsufficientSampleError for too few paths or grid points and when fewer
/// than min_scales dyadic scales are resolvable.
RegularityReport regularity_scaling(const PathEnsemble& ens, double hurst,
                                    const RegularityConfig& config = {});

/// Least-squares slope of log y against log x, with RMS residual.
ScalingFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Linear-interpolation quantile (type 7), p in [0, 1].
double quantile(std::vector<double> values, double p);

}  // namespace mfv
