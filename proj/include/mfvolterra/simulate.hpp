#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "mfvolterra/covariance.hpp"
#include "mfvolterra/grid.hpp"
#include "mfvolterra/hurst.hpp"
#include "mfvolterra/quadrature.hpp"

namespace mfv {

enum class SamplingMethod { Cholesky, Volterra, Imported };

std::string to_string(SamplingMethod method);

/// n_paths x n_times sample paths; column 0 (t = 0) is exactly zero.
struct PathEnsemble {
  TimeGrid grid;
  Eigen::MatrixXd paths;
  SamplingMethod method = SamplingMethod::Imported;
  std::uint64_t seed = 0;
  std::string hurst;
  int n_sub = 0;  ///< Volterra cells; 0 otherwise

  Eigen::Index n_paths() const { return paths.rows(); }
  Eigen::Index n_times() const { return paths.cols(); }
};

/// Lower Cholesky factor of the covariance restricted to t > 0.
struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;  ///< diagonal jitter that was needed (0 if none)
};

/// Factorizes the t > 0 block. On failure adds jitter 1e-14 * max diagonal and
/// escalates by 10x up to 1e-8 * max diagonal, then throws FactorizationError.
CholeskyFactor factorize(const CovarianceMatrix& cov);

/// Exact Gaussian sampling with the covariance produced by `method`.
PathEnsemble sample_cholesky(const TimeGrid& grid, const HurstFunction& h, int n_paths,
                             std::uint64_t seed,
                             CovarianceMethod method = CovarianceMethod::InnerProduct,
                             const QuadratureSpec& q = {});

/// Exact Gaussian sampling from a prebuilt covariance matrix.
PathEnsemble sample_cholesky(const CovarianceMatrix& cov, int n_paths, std::uint64_t seed);

/// w_ij = Delta^{-1/2} * integral of K_{h(t_i)}(t_i, u) over cell j intersected with (0, t_i],
/// for n_sub equal cells on (0, T]. Returns an n_times x n_sub matrix.
Eigen::MatrixXd volterra_weights(const TimeGrid& grid, const HurstFunction& h, int n_sub,
                                 const QuadratureSpec& q = {});

/// B(t_i) = sum_j w_ij xi_j with cell noises xi_j. When n_sub is a power of two the
/// cell noises come from a dyadic Brownian bridge keyed by tree node, so ensembles
/// with the same seed and different power-of-two n_sub are driven by the same
/// white noise.
PathEnsemble sample_volterra(const TimeGrid& grid, const HurstFunction& h, int n_sub,
                             int n_paths, std::uint64_t seed, const QuadratureSpec& q = {});

/// Unbiased sample covariance across paths (method tag: empirical).
CovarianceMatrix empirical_cov(const PathEnsemble& ens);

/// CSV: header "path,<t_0>,...", then one row per path.
void write_csv(const PathEnsemble& ens, std::ostream& out);
PathEnsemble read_csv(std::istream& in);

/// Binary dump: "MFVL", u32 version, u32 n_paths, u32 n_times, then n_times float64
/// grid times, then the path matrix as float64 in column-major order.
void write_binary(const PathEnsemble& ens, std::ostream& out);
PathEnsemble read_binary(std::istream& in);

inline constexpr std::uint32_t kEnsembleFormatVersion = 1;

}  // namespace mfv
