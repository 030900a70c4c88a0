#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfvolterra/analysis.hpp"
#include "mfvolterra/grid.hpp"
#include "mfvolterra/hurst.hpp"
#include "mfvolterra/quadrature.hpp"
#include "mfvolterra/simulate.hpp"

namespace mfv {

/// Which variance function drives dR: the process variance t^{2h(t)} / c^2_{h(t)}
/// (Normalized) or t^{2h(t)} alone (Unnormalized).
enum class VarianceConvention { Normalized, Unnormalized };

std::string to_string(VarianceConvention c);
VarianceConvention variance_convention_from_string(const std::string& name);

double variance_function(double t, const HurstFunction& h, VarianceConvention c);
double variance_function_derivative(double t, const HurstFunction& h, VarianceConvention c);

/// w_i = R'(tau_i) (t_{i+1} - t_i) for each grid step, tau_i = t_i except the first
/// step, which uses its right endpoint (R' is not defined at 0).
std::vector<double> variance_step_weights(const TimeGrid& grid, const HurstFunction& h,
                                          VarianceConvention c = VarianceConvention::Normalized);

/// sum over steps inside [0, t] of p_eps(B(t_i) - a) w_i.
double smoothed_weighted_occupation(std::span<const double> path, const TimeGrid& grid,
                                    std::span<const double> step_weights, double a, double eps,
                                    double t);
double smoothed_weighted_occupation(std::span<const double> path, const TimeGrid& grid, double a,
                                    double eps, const HurstFunction& h, double t,
                                    VarianceConvention c = VarianceConvention::Normalized);

struct WeightedLocalTime {
  double a = 0.0;
  std::vector<double> checkpoints;
  std::vector<double> values;  ///< integral of R' against L(du, a) over [0, t_k]; signed
  VarianceConvention convention = VarianceConvention::Normalized;
};

/// Stieltjes sum of R'(tau_i) against the increments of the binned local time at the
/// bin containing a. Throws RangeError when a is outside the bins.
WeightedLocalTime weighted_local_time(std::span<const double> path, const TimeGrid& grid,
                                      double a, const HurstFunction& h, const Bins& bins,
                                      const std::vector<double>& checkpoints,
                                      VarianceConvention c = VarianceConvention::Normalized);

/// Integral over [0, t] of p_{R(s)+eps}(a) R'(s) ds (normalized convention).
double tanaka_deterministic(const HurstFunction& h, double a, double eps, double t,
                            const QuadratureSpec& q = {});

struct TanakaCheck {
  double a = 0.0;
  double eps = 0.0;
  double t = 0.0;
  double mc_mean = 0.0;
  double mc_se = 0.0;
  double deterministic = 0.0;
  double discrete_expectation = 0.0;  ///< exact mean of the time-discretized functional
  bool pass = false;                  ///< |mc_mean - deterministic| <= 3 mc_se
};

/// Monte Carlo mean of smoothed_weighted_occupation over an ensemble versus the
/// deterministic integral.
TanakaCheck tanaka_expectation_identity(const PathEnsemble& ens, const HurstFunction& h, double a,
                                        double eps, double t, const QuadratureSpec& q = {});

/// Simulates n_paths exact paths on `grid_points` equally spaced times of [0, t].
TanakaCheck tanaka_expectation_identity(const HurstFunction& h, double a, double eps, double t,
                                        int n_paths, std::uint64_t seed, int grid_points = 1025,
                                        const QuadratureSpec& q = {});

/// Minimum paths for the Monte Carlo checks.
inline constexpr int kMinMonteCarloPaths = 100;

struct TanakaRemainder {
  double a = 0.0;
  double t = 0.0;
  double mean_residual = 0.0;  ///< mean over paths of |B(t)-a| - |a| - Lhat_eps([0,t], a)
  double se = 0.0;
  double expected = 0.0;       ///< E|B(t)-a| - |a| - E[Lhat_eps] for the discretized estimator
  double continuum_gap = 0.0;  ///< E|B(t)-a| - |a| - integral of p_{R(s)}(a) dR(s); 0 in theory
  bool pass = false;           ///< |mean_residual - expected| <= 3 se
};

/// The divergence-integral term of the Tanaka decomposition is centered; checks
/// that the ensemble mean of the remainder matches its exact expectation.
TanakaRemainder tanaka_remainder_check(const PathEnsemble& ens, const HurstFunction& h, double a,
                                       double t, double eps, const QuadratureSpec& q = {});

/// E|X - a| for X ~ N(0, variance).
double expected_abs_deviation(double variance, double a);

struct DegenerateVarianceReport {
  double s = 0.0;
  double t = 0.0;
  double max_unnormalized_deviation = 0.0;   ///< max |u^{2h(u)} - e^2|
  double max_unnormalized_derivative = 0.0;  ///< max |R_u'|, analytic and finite difference
  double max_normalized_derivative = 0.0;    ///< max |R'| under the normalized convention
  bool unnormalized_constant = false;        ///< both maxima above <= 1e-10
  bool normalized_varies = false;            ///< max |R'| > 1e-3
};

/// h(u) = 1 / log(clamp(u, s, t)); requires e < s < t < e^2 so that h lies in (1/2, 1).
HurstFunction log_reciprocal_hurst(double s, double t);

/// Checks on a 101-point lattice of [s, t] that u^{2h(u)} is constant (e^2), that its
/// derivative vanishes, and that the normalized variance is not constant.
DegenerateVarianceReport degenerate_variance_case(double s, double t);

}  // namespace mfv
