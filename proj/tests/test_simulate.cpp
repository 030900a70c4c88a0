#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "mfvolterra/covariance.hpp"
#include "mfvolterra/errors.hpp"
#include "mfvolterra/rng.hpp"
#include "mfvolterra/simulate.hpp"
#include "mfvolterra/specfun.hpp"

using namespace mfv;

namespace {

HurstFunction sinusoid() {
  return HurstFunction::sinusoidal(0.75, 0.15, 2.0 * std::numbers::pi, 0.0, 0.6, 0.9);
}

double sample_var(const Eigen::VectorXd& x) {
  const double m = x.mean();
  return (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
}

// Runs f with MFVOLTERRA_THREADS set to n, restoring the previous value.
template <class F>
auto with_threads(const char* n, F f) {
  const char* old = std::getenv("MFVOLTERRA_THREADS");
  const std::string saved = old ? old : "";
  setenv("MFVOLTERRA_THREADS", n, 1);
  auto out = f();
  if (old) {
    setenv("MFVOLTERRA_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("MFVOLTERRA_THREADS");
  }
  return out;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  using A = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
        A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal stream") {
  const NormalStream z(42, NoiseDomain::Test, 0);
  CHECK(z(17) == NormalStream(42, NoiseDomain::Test, 0)(17));
  CHECK(z(17) != NormalStream(43, NoiseDomain::Test, 0)(17));
  CHECK(z(17) != NormalStream(42, NoiseDomain::Test, 1)(17));
  std::vector<double> buf(100000);
  z.fill(0, buf);
  CHECK(buf[17] == z(17));
  double m = 0.0, m2 = 0.0, m4 = 0.0;
  for (double v : buf) {
    m += v;
    m2 += v * v;
    m4 += v * v * v * v;
  }
  const double n = static_cast<double>(buf.size());
  CHECK(std::abs(m / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(m2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("cholesky ensemble shape and determinism") {
  const auto grid = TimeGrid::uniform(1.0, 6);
  const auto a = sample_cholesky(grid, sinusoid(), 1, 9, CovarianceMethod::GramNodes);
  const auto b = sample_cholesky(grid, sinusoid(), 1, 9, CovarianceMethod::GramNodes);
  CHECK(a.paths == b.paths);
  CHECK(a.paths(0, 0) == 0.0);
  CHECK(a.paths.allFinite());
  CHECK(a.method == SamplingMethod::Cholesky);
  CHECK(a.seed == 9);
  const auto c = sample_cholesky(grid, sinusoid(), 1, 10, CovarianceMethod::GramNodes);
  CHECK(c.paths != a.paths);
  // a path depends only on (seed, index), not on how many are drawn
  const auto many = sample_cholesky(grid, sinusoid(), 5, 9, CovarianceMethod::GramNodes);
  CHECK(many.paths.row(0) == a.paths.row(0));
}

TEST_CASE("cholesky marginal variance at t = 1") {
  const auto h = HurstFunction::constant(0.75);
  const auto ens = sample_cholesky(TimeGrid::uniform(1.0, 8), h, 20000, 2024,
                                   CovarianceMethod::FbmClosedForm);
  const double exact = c_lambda_inv_sq(0.75);
  const double se = exact * std::sqrt(2.0 / 19999.0);
  CHECK(std::abs(sample_var(ens.paths.col(7)) - exact) <= 3.0 * se);
}

TEST_CASE("empirical covariance matches the exact matrix") {
  const auto s = sinusoid();
  const auto grid = TimeGrid({0.0, 0.25, 0.5, 0.75, 1.0});
  const auto exact = build_cov_matrix(grid, s, CovarianceMethod::GramNodes);
  const auto ens = sample_cholesky(exact, 20000, 77);
  const auto emp = empirical_cov(ens);
  CHECK(emp.method == CovarianceMethod::Empirical);
  const double n = 20000.0;
  int inside = 0, total = 0;
  for (Eigen::Index i = 1; i < 5; ++i) {
    for (Eigen::Index j = 1; j < 5; ++j) {
      CHECK(emp.entries(i, j) == emp.entries(j, i));
      const auto& c = exact.entries;
      const double se = std::sqrt((c(i, i) * c(j, j) + c(i, j) * c(i, j)) / (n - 1.0));
      ++total;
      if (std::abs(emp.entries(i, j) - c(i, j)) <= 3.0 * se) ++inside;
    }
  }
  CHECK(inside >= 0.95 * total);
  // the (0.5, 1.0) entry on its own
  const auto& c = exact.entries;
  const double se = std::sqrt((c(2, 2) * c(4, 4) + c(2, 4) * c(2, 4)) / (n - 1.0));
  CHECK(std::abs(emp.entries(2, 4) - c(2, 4)) <= 3.0 * se);
}

TEST_CASE("empirical covariance of zero paths") {
  PathEnsemble ens{TimeGrid::uniform(1.0, 3), Eigen::MatrixXd::Zero(4, 3)};
  CHECK(empirical_cov(ens).entries.isZero(0.0));
}

TEST_CASE("cholesky increments follow the fBm law for constant h") {
  const double lam = 0.7;
  const auto grid = TimeGrid::uniform(1.0, 11);
  const auto ens =
      sample_cholesky(grid, HurstFunction::constant(lam), 20000, 5, CovarianceMethod::FbmClosedForm);
  const std::array<std::pair<int, int>, 10> pairs{
      {{0, 3}, {1, 2}, {2, 9}, {3, 4}, {4, 10}, {5, 7}, {6, 8}, {1, 10}, {7, 9}, {2, 5}}};
  int inside = 0;
  for (auto [i, j] : pairs) {
    const double exact = c_lambda_inv_sq(lam) * std::pow(grid[j] - grid[i], 2 * lam);
    const double v = sample_var(ens.paths.col(j) - ens.paths.col(i));
    if (std::abs(v - exact) <= 3.0 * exact * std::sqrt(2.0 / 19999.0)) ++inside;
  }
  CHECK(inside >= 9);
}

TEST_CASE("factorization repairs a rank-deficient matrix and rejects an indefinite one") {
  CovarianceMatrix cov{TimeGrid({0.0, 0.5, 1.0}), Eigen::MatrixXd::Zero(3, 3),
                       CovarianceMethod::InnerProduct, "test"};
  cov.entries.bottomRightCorner(2, 2) << 1.0, 1.0, 1.0, 1.0;
  const auto f = factorize(cov);
  CHECK(f.jitter > 0.0);
  CHECK(f.jitter <= 1e-8);
  cov.entries.bottomRightCorner(2, 2) << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(factorize(cov), FactorizationError);
}

TEST_CASE("volterra weights converge to the exact variance") {
  const auto h = HurstFunction::constant(0.75);
  const auto grid = TimeGrid::uniform(1.0, 8);
  const double exact = c_lambda_inv_sq(0.75);
  const double coarse = volterra_weights(grid, h, 128).row(7).squaredNorm();
  const double fine = volterra_weights(grid, h, 2048).row(7).squaredNorm();
  CHECK(std::abs(fine - exact) / exact <= 0.02);
  CHECK(std::abs(fine - exact) < std::abs(coarse - exact));
  CHECK(volterra_weights(grid, h, 128).row(0).isZero(0.0));
}

TEST_CASE("volterra sampler") {
  const auto h = HurstFunction::constant(0.75);
  const auto grid = TimeGrid::uniform(1.0, 8);
  const double exact = c_lambda_inv_sq(0.75);
  const auto fine = sample_volterra(grid, h, 2048, 20000, 31);
  const auto coarse = sample_volterra(grid, h, 128, 20000, 31);
  CHECK(fine.method == SamplingMethod::Volterra);
  CHECK(fine.n_sub == 2048);
  CHECK(fine.paths.col(0).isZero(0.0));
  CHECK(fine.paths.allFinite());
  const double vf = sample_var(fine.paths.col(7));
  CHECK(std::abs(vf - exact) / exact <= 0.02 + 3.0 * std::sqrt(2.0 / 19999.0));
  // dyadic noise is shared between the two resolutions, so the paired difference of
  // squares isolates the refinement gain
  const Eigen::ArrayXd d = fine.paths.col(7).array().square() - coarse.paths.col(7).array().square();
  const double gain = volterra_weights(grid, h, 2048).row(7).squaredNorm() -
                      volterra_weights(grid, h, 128).row(7).squaredNorm();
  const double se = std::sqrt((d - d.mean()).square().sum() / (d.size() - 1.0) / d.size());
  CHECK(gain > 0.0);
  CHECK(std::abs(d.mean() - gain) <= 3.0 * se);
  CHECK(se < gain);
  const auto again = sample_volterra(grid, h, 2048, 3, 31);
  CHECK(again.paths == fine.paths.topRows(3));
  CHECK_THROWS(sample_volterra(grid, h, 4, 3, 31));
}

TEST_CASE("ensembles do not depend on the worker count") {
  const auto grid = TimeGrid::uniform(1.0, 9);
  const auto s = sinusoid();
  auto chol = [&] { return sample_cholesky(grid, s, 300, 8, CovarianceMethod::GramNodes).paths; };
  auto volt = [&] { return sample_volterra(grid, s, 256, 300, 8).paths; };
  auto wts = [&] { return volterra_weights(grid, s, 64); };
  CHECK(with_threads("1", chol) == with_threads("4", chol));
  CHECK(with_threads("1", volt) == with_threads("3", volt));
  CHECK(with_threads("1", wts) == with_threads("5", wts));
}

TEST_CASE("ensemble CSV and binary round trips") {
  const auto ens = sample_volterra(TimeGrid::uniform(2.0, 5), sinusoid(), 64, 7, 3);
  std::stringstream bin;
  write_binary(ens, bin);
  CHECK(bin.str().substr(0, 4) == "MFVL");
  const auto back = read_binary(bin);
  CHECK(back.paths == ens.paths);
  CHECK(std::equal(back.grid.times().begin(), back.grid.times().end(), ens.grid.times().begin()));
  CHECK(back.method == SamplingMethod::Imported);

  std::stringstream csv;
  write_csv(ens, csv);
  const auto fromcsv = read_csv(csv);
  CHECK(fromcsv.paths == ens.paths);
  CHECK(fromcsv.grid.horizon() == 2.0);

  std::stringstream again;
  write_csv(fromcsv, again);
  std::stringstream first;
  write_csv(ens, first);
  CHECK(again.str() == first.str());
}

TEST_CASE("binary reader rejects foreign data") {
  std::stringstream junk("NOPE and then some bytes");
  CHECK_THROWS(read_binary(junk));
  std::stringstream truncated;
  write_binary(sample_volterra(TimeGrid::uniform(1.0, 3), sinusoid(), 8, 2, 1), truncated);
  std::string s = truncated.str();
  std::stringstream cut(s.substr(0, s.size() - 5));
  CHECK_THROWS(read_binary(cut));
}
