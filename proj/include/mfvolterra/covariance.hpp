#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "mfvolterra/grid.hpp"
#include "mfvolterra/hurst.hpp"
#include "mfvolterra/quadrature.hpp"

namespace mfv {

enum class CovarianceMethod {
  InnerProduct,    ///< integral of K_l(t,u) K_l'(s,u) over [0, t ^ s]
  DoubleIntegral,  ///< beta-weighted |y - z|^{l + l' - 2} (y/z)^{l - l'} double integral
  GramNodes,       ///< kernel inner products on shared graded Gauss nodes (fast, large grids)
  FbmClosedForm,   ///< c^-2 (t^2H + s^2H - |t - s|^2H) / 2; constant h only
  Empirical,       ///< sample covariance of a path ensemble
};

std::string to_string(CovarianceMethod method);
CovarianceMethod covariance_method_from_string(const std::string& name);

struct CovarianceMatrix {
  TimeGrid grid;
  Eigen::MatrixXd entries;
  CovarianceMethod method;
  std::string hurst;
};

/// E[X(t, l) X(s, l')] for the two-parameter field X(t, l) = int_0^t K_l(t, u) W(du),
/// evaluated as the double integral over [0,t] x [0,s] of
///   beta~(y, z) |y - z|^{l + l' - 2} (y / z)^{l - l'},
/// beta~ = B(2 - l - l', l' - 1/2) for y > z and B(2 - l - l', l - 1/2) for y < z.
/// Each triangle is integrated with r = |y - z|^{l + l' - 1} on the inner variable.
double cross_cov_double_integral(double t, double s, double lambda, double lambda_p,
                                 const QuadratureSpec& q = {});

/// The same covariance as the kernel inner product over [0, t ^ s].
double cross_cov_inner_product(double t, double s, double lambda, double lambda_p,
                               const QuadratureSpec& q = {});

/// Covariance of fBm with variance c_H^-2 t^{2H}.
double fbm_covariance(double t, double s, double H);

/// R(t) = E[B_h(t)^2] = t^{2h(t)} / c^2_{h(t)}.
double variance(double t, const HurstFunction& h);

/// R'(t), with the c^-2 factor differentiated analytically.
double variance_derivative(double t, const HurstFunction& h);

/// Unnormalized variance t^{2h(t)} (c factor dropped) and its derivative
/// 2 (h'(t) log t + h(t) / t) t^{2h(t)}.
double variance_unnormalized(double t, const HurstFunction& h);
double variance_unnormalized_derivative(double t, const HurstFunction& h);

/// Sum of |R(t_k) - R(t_{k-1})| over the uniform n-point partition of [s, t].
double variance_total_variation(double s, double t, const HurstFunction& h, int n);

/// E[(B_h(t) - B_h(s))^2] (arguments in either order), for s <= t
///   int_0^s (K_{h(t)}(t,u) - K_{h(s)}(s,u))^2 du + int_s^t K_{h(t)}(t,u)^2 du.
double increment_second_moment(double s, double t, const HurstFunction& h,
                               const QuadratureSpec& q = {});

/// 2 C_T |h(t) - h(s)|^2 + 2 c^-2_{h(s)} |t - s|^{2 h(s)}, with C_T the squared L2
/// norm of the calibrated Phi_T on [0, horizon].
double increment_moment_bound(double s, double t, const HurstFunction& h, double horizon);

/// Covariance of B_h on a grid via shared quadrature nodes: each grid cell
/// [t_{k-1}, t_k] gets a Gauss-Legendre rule graded toward t_k (where K_{h(t_k)}(t_k, .)
/// vanishes like a fractional power); the first cell is also graded toward 0. All
/// kernels are tabulated once on these nodes and C = G W G^T.
Eigen::MatrixXd gram_covariance(const TimeGrid& grid, const HurstFunction& h,
                                const QuadratureSpec& q = {});

/// Covariance of B_h on a grid. Entries involving t = 0 are exactly zero.
/// Quadrature failures are rethrown with the offending (i, j) in the message.
CovarianceMatrix build_cov_matrix(const TimeGrid& grid, const HurstFunction& h,
                                  CovarianceMethod method, const QuadratureSpec& q = {});

/// CSV: header "t,<t_0>,...,<t_n>", then one row per grid time.
void write_csv(const CovarianceMatrix& cov, std::ostream& out);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

/// max_ij |a_ij - b_ij| / max(|a_ij|, |b_ij|), skipping pairs that are both zero.
double max_relative_discrepancy(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace mfv
