#include "mfvolterra/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "mfvolterra/errors.hpp"
#include "mfvolterra/kernel.hpp"
#include "mfvolterra/parallel.hpp"
#include "mfvolterra/rng.hpp"

namespace mfv {

namespace {

// Paths per work block. Blocks are always this wide (the last one zero-padded) so
// the matrix products see identical shapes whatever the worker count.
constexpr Eigen::Index kChunk = 64;

void check_paths(int n_paths) {
  if (n_paths < 1) throw DomainError("n_paths must be at least 1");
}

// rows(out) = n_paths; out.col(0) = 0; out.col(1 + k) = (A z_p)_k.
// fill(p, z) writes the noise vector of path p.
template <class Apply, class Fill>
Eigen::MatrixXd sample_linear(Eigen::Index n_out, Eigen::Index n_noise, int n_paths,
                              Apply&& apply, Fill&& fill) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_paths, n_out + 1);
  const Eigen::Index n_chunks = (n_paths + kChunk - 1) / kChunk;
  parallel_for(static_cast<std::size_t>(n_chunks), [&](std::size_t c) {
    const Eigen::Index first = static_cast<Eigen::Index>(c) * kChunk;
    const Eigen::Index count = std::min<Eigen::Index>(kChunk, n_paths - first);
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n_noise, kChunk);
    for (Eigen::Index k = 0; k < count; ++k) {
      fill(static_cast<std::uint32_t>(first + k),
           std::span<double>(z.col(k).data(), static_cast<std::size_t>(n_noise)));
    }
    const Eigen::MatrixXd y = apply(z);
    out.block(first, 1, count, n_out) = y.leftCols(count).transpose();
  });
  return out;
}

}  // namespace

std::string to_string(SamplingMethod method) {
  switch (method) {
    case SamplingMethod::Cholesky: return "cholesky";
    case SamplingMethod::Volterra: return "volterra";
    case SamplingMethod::Imported: return "imported";
  }
  return "unknown";
}

CholeskyFactor factorize(const CovarianceMatrix& cov) {
  const Eigen::Index n = cov.entries.rows() - 1;
  if (n < 1) throw DomainError("factorize: grid needs at least two points");
  const Eigen::MatrixXd block = cov.entries.bottomRightCorner(n, n);
  const double max_diag = block.diagonal().maxCoeff();
  if (!(max_diag > 0.0)) throw FactorizationError("covariance has no positive diagonal");
  Eigen::LLT<Eigen::MatrixXd> llt(block);
  if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};
  for (double rel = 1e-14; rel <= 1e-8 * (1.0 + 1e-9); rel *= 10.0) {
    const double jitter = rel * max_diag;
    Eigen::MatrixXd shifted = block;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
  }
  throw FactorizationError("covariance not positive definite even with jitter 1e-8 x max diagonal");
}

PathEnsemble sample_cholesky(const TimeGrid& grid, const HurstFunction& h, int n_paths,
                             std::uint64_t seed, CovarianceMethod method,
                             const QuadratureSpec& q) {
  check_paths(n_paths);
  if (grid.size() < 2) throw DomainError("sample_cholesky: grid needs at least two points");
  return sample_cholesky(build_cov_matrix(grid, h, method, q), n_paths, seed);
}

PathEnsemble sample_cholesky(const CovarianceMatrix& cov, int n_paths, std::uint64_t seed) {
  check_paths(n_paths);
  const CholeskyFactor factor = factorize(cov);
  const Eigen::Index n = factor.lower.rows();
  auto apply = [&](const Eigen::MatrixXd& z) -> Eigen::MatrixXd {
    return factor.lower.triangularView<Eigen::Lower>() * z;
  };
  auto fill = [&](std::uint32_t path, std::span<double> z) {
    NormalStream(seed, NoiseDomain::Cholesky, path).fill(0, z);
  };
  PathEnsemble ens{cov.grid, sample_linear(n, n, n_paths, apply, fill), SamplingMethod::Cholesky,
                   seed, cov.hurst, 0};
  return ens;
}

Eigen::MatrixXd volterra_weights(const TimeGrid& grid, const HurstFunction& h, int n_sub,
                                 const QuadratureSpec& q) {
  q.validate();
  if (n_sub < static_cast<int>(grid.size())) {
    throw DomainError("sample_volterra: n_sub must be at least the grid size");
  }
  const double T = grid.horizon();
  const double dx = T / n_sub;
  const double inv_sqrt = 1.0 / std::sqrt(dx);
  const auto n_times = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_times, n_sub);
  parallel_for(grid.size() - 1, [&](std::size_t r) {
    const std::size_t i = r + 1;
    const double t = grid[i];
    const double H = h(t);
    auto k_off = [&](double u, double) { return u < t ? volterra_kernel(t, u, H, q) : 0.0; };
    auto k = [&](double u) { return u < t ? volterra_kernel(t, u, H, q) : 0.0; };
    // Integral of K(t, .) over [lo, hi] within (0, t]: power substitutions at u = 0
    // (u^{1/2-H}) and at u = t ((t-u)^{H-1/2}).
    auto cell = [&](double lo, double hi) {
      if (lo == 0.0 && hi >= t) {
        const double mid = 0.5 * t;
        return integrate_left_power(k_off, 0.0, mid, 0.5 - H, q).value +
               integrate_right_power(k_off, mid, t, H - 0.5, q).value;
      }
      if (lo == 0.0) return integrate_left_power(k_off, 0.0, hi, 0.5 - H, q).value;
      if (hi >= t) return integrate_right_power(k_off, lo, t, H - 0.5, q).value;
      return integrate(k, lo, hi, q).value;
    };
    for (int j = 0; j < n_sub; ++j) {
      const double lo = j * dx;
      if (!(lo < t)) break;
      const double hi = (j + 1 == n_sub) ? T : (j + 1) * dx;
      w(static_cast<Eigen::Index>(i), j) = inv_sqrt * cell(lo, std::min(hi, t));
    }
  });
  return w;
}

PathEnsemble sample_volterra(const TimeGrid& grid, const HurstFunction& h, int n_sub,
                             int n_paths, std::uint64_t seed, const QuadratureSpec& q) {
  check_paths(n_paths);
  if (grid.size() < 2) throw DomainError("sample_volterra: grid needs at least two points");
  const Eigen::MatrixXd w = volterra_weights(grid, h, n_sub, q);
  const Eigen::Index n = w.rows() - 1;
  const Eigen::MatrixXd w_pos = w.bottomRows(n);
  auto apply = [&](const Eigen::MatrixXd& z) -> Eigen::MatrixXd { return w_pos * z; };

  const bool dyadic = std::has_single_bit(static_cast<unsigned>(n_sub));
  auto fill = [&](std::uint32_t path, std::span<double> z) {
    if (!dyadic) {
      NormalStream(seed, NoiseDomain::Volterra, path).fill(0, z);
      return;
    }
    // Brownian bridge on unit-variance increments: a parent increment I over two
    // children splits as I/2 +- sqrt(var)/2 * Z, Z indexed by the parent's tree node.
    const NormalStream normal(seed, NoiseDomain::Bridge, path);
    std::vector<double> inc{normal(0) * std::sqrt(static_cast<double>(n_sub))};
    std::vector<double> next;
    for (std::uint64_t width = 1; width < static_cast<std::uint64_t>(n_sub); width *= 2) {
      const double half_sd = 0.5 * std::sqrt(static_cast<double>(n_sub / width));
      next.resize(2 * width);
      for (std::uint64_t k = 0; k < width; ++k) {
        const double left = 0.5 * inc[k] + half_sd * normal(width + k);
        next[2 * k] = left;
        next[2 * k + 1] = inc[k] - left;
      }
      inc.swap(next);
    }
    std::copy(inc.begin(), inc.end(), z.begin());
  };
  PathEnsemble ens{grid, sample_linear(n, n_sub, n_paths, apply, fill), SamplingMethod::Volterra,
                   seed, h.descriptor(), n_sub};
  return ens;
}

CovarianceMatrix empirical_cov(const PathEnsemble& ens) {
  if (ens.n_paths() < 2) throw InsufficientSampleError("empirical_cov needs at least 2 paths");
  const Eigen::MatrixXd centered = ens.paths.rowwise() - ens.paths.colwise().mean();
  Eigen::MatrixXd c = (centered.transpose() * centered) / static_cast<double>(ens.n_paths() - 1);
  c = 0.5 * (c + c.transpose()).eval();
  return CovarianceMatrix{ens.grid, c, CovarianceMethod::Empirical, ens.hurst};
}

void write_csv(const PathEnsemble& ens, std::ostream& out) {
  const auto old = out.precision(17);
  out << "path";
  for (double t : ens.grid.times()) out << ',' << t;
  out << '\n';
  for (Eigen::Index p = 0; p < ens.n_paths(); ++p) {
    out << p;
    for (Eigen::Index i = 0; i < ens.n_times(); ++i) out << ',' << ens.paths(p, i);
    out << '\n';
  }
  out.precision(old);
}

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t line_no) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw ConfigError("ensemble CSV line " + std::to_string(line_no) + ": bad number '" +
                        cell + "'");
    }
  }
  return v;
}

}  // namespace

PathEnsemble read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("path,", 0) != 0) {
    throw ConfigError("ensemble CSV: missing 'path,<times>' header");
  }
  const std::vector<double> times = parse_row(line.substr(5), 1);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto row = parse_row(line, line_no);
    if (row.size() != times.size() + 1) {
      throw ConfigError("ensemble CSV line " + std::to_string(line_no) + ": wrong column count");
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd paths(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(times.size()));
  for (std::size_t p = 0; p < rows.size(); ++p) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      paths(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) = rows[p][i + 1];
    }
  }
  return PathEnsemble{TimeGrid(times), std::move(paths), SamplingMethod::Imported, 0, "", 0};
}

void write_binary(const PathEnsemble& ens, std::ostream& out) {
  const std::uint32_t header[3] = {kEnsembleFormatVersion,
                                   static_cast<std::uint32_t>(ens.n_paths()),
                                   static_cast<std::uint32_t>(ens.n_times())};
  out.write("MFVL", 4);
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(ens.grid.times().data()),
            static_cast<std::streamsize>(ens.grid.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(ens.paths.data()),
            static_cast<std::streamsize>(ens.paths.size() * sizeof(double)));
  if (!out) throw NumericalError("failed to write ensemble");
}

PathEnsemble read_binary(std::istream& in) {
  char magic[4];
  std::uint32_t header[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in || std::memcmp(magic, "MFVL", 4) != 0) throw ConfigError("not an MFVL ensemble file");
  if (header[0] != kEnsembleFormatVersion) {
    throw ConfigError("unsupported ensemble format version " + std::to_string(header[0]));
  }
  std::vector<double> times(header[2]);
  in.read(reinterpret_cast<char*>(times.data()),
          static_cast<std::streamsize>(times.size() * sizeof(double)));
  Eigen::MatrixXd paths(static_cast<Eigen::Index>(header[1]), static_cast<Eigen::Index>(header[2]));
  in.read(reinterpret_cast<char*>(paths.data()),
          static_cast<std::streamsize>(paths.size() * sizeof(double)));
  if (!in) throw ConfigError("truncated ensemble file");
  return PathEnsemble{TimeGrid(std::move(times)), std::move(paths), SamplingMethod::Imported, 0,
                      "", 0};
}

}  // namespace mfv
