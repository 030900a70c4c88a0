#include "mfvolterra/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "mfvolterra/errors.hpp"
#include "mfvolterra/kernel.hpp"
#include "mfvolterra/parallel.hpp"
#include "mfvolterra/specfun.hpp"

namespace mfv {

namespace {

void check_lambda(double lambda, const char* what) {
  if (!(lambda > 0.5 && lambda < 1.0)) {
    throw DomainError(std::string(what) + " must lie in (1/2,1), got " + std::to_string(lambda));
  }
}

void check_time(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError(std::string(what) + " must be a finite non-negative time");
  }
}

}  // namespace

std::string to_string(CovarianceMethod method) {
  switch (method) {
    case CovarianceMethod::InnerProduct: return "inner_product";
    case CovarianceMethod::DoubleIntegral: return "double_integral";
    case CovarianceMethod::GramNodes: return "gram";
    case CovarianceMethod::FbmClosedForm: return "fbm_closed_form";
    case CovarianceMethod::Empirical: return "empirical";
  }
  return "unknown";
}

CovarianceMethod covariance_method_from_string(const std::string& name) {
  if (name == "inner_product") return CovarianceMethod::InnerProduct;
  if (name == "double_integral") return CovarianceMethod::DoubleIntegral;
  if (name == "gram") return CovarianceMethod::GramNodes;
  if (name == "fbm_closed_form") return CovarianceMethod::FbmClosedForm;
  if (name == "empirical") return CovarianceMethod::Empirical;
  throw ConfigError("unknown covariance method '" + name + "'");
}

double cross_cov_double_integral(double t, double s, double lambda, double lambda_p,
                                 const QuadratureSpec& q) {
  check_time(t, "t");
  check_time(s, "s");
  check_lambda(lambda, "lambda");
  check_lambda(lambda_p, "lambda'");
  q.validate();
  if (t == 0.0 || s == 0.0) return 0.0;
  const double m = std::min(t, s);
  const double e = lambda + lambda_p - 1.0;
  const double inv_e = 1.0 / e;
  const double delta = lambda - lambda_p;
  const double b_above = beta_fn(2.0 - lambda - lambda_p, lambda_p - 0.5);
  const double b_below = beta_fn(2.0 - lambda - lambda_p, lambda - 0.5);
  const QuadratureSpec qi = q.tightened(0.01);

  // y > z: inner over y in (z, t) of (y - z)^{e-1} (y/z)^delta.
  auto above = [&](double z, double) {
    auto f = [&](double r) { return std::exp(delta * std::log1p(std::pow(r, inv_e) / z)); };
    return inv_e * integrate(f, 0.0, std::pow(t - z, e), qi).value;
  };
  // y < z: roles swapped, inner over z in (y, s) of (z - y)^{e-1} (y/z)^delta.
  auto below = [&](double y, double) {
    auto f = [&](double r) { return std::exp(-delta * std::log1p(std::pow(r, inv_e) / y)); };
    return inv_e * integrate(f, 0.0, std::pow(s - y, e), qi).value;
  };
  const double part_above = integrate_left_power(above, 0.0, m, -std::max(delta, 0.0), q).value;
  const double part_below = integrate_left_power(below, 0.0, m, -std::max(-delta, 0.0), q).value;
  return b_above * part_above + b_below * part_below;
}

double cross_cov_inner_product(double t, double s, double lambda, double lambda_p,
                               const QuadratureSpec& q) {
  check_time(t, "t");
  check_time(s, "s");
  check_lambda(lambda, "lambda");
  check_lambda(lambda_p, "lambda'");
  q.validate();
  if (t == 0.0 || s == 0.0) return 0.0;
  const double m = std::min(t, s);
  const QuadratureSpec qi = q.tightened(0.1);
  auto f = [&](double u, double) {
    if (!(u < m)) return 0.0;
    return std::pow(u, 1.0 - lambda - lambda_p) * kernel_segment(u, u, t, lambda, qi) *
           kernel_segment(u, u, s, lambda_p, qi);
  };
  // Near u = t ^ s the kernel(s) ending there vanish like (m - u)^{l - 1/2}.
  double right_alpha = 0.0;
  if (t == m) right_alpha += lambda - 0.5;
  if (s == m) right_alpha += lambda_p - 0.5;
  const double half = 0.5 * m;
  return integrate_left_power(f, 0.0, half, 1.0 - lambda - lambda_p, q).value +
         integrate_right_power(f, half, m, right_alpha, q).value;
}

double fbm_covariance(double t, double s, double H) {
  check_time(t, "t");
  check_time(s, "s");
  check_lambda(H, "H");
  return 0.5 * c_lambda_inv_sq(H) *
         (std::pow(t, 2.0 * H) + std::pow(s, 2.0 * H) - std::pow(std::abs(t - s), 2.0 * H));
}

double variance(double t, const HurstFunction& h) {
  check_time(t, "t");
  if (t == 0.0) return 0.0;
  const double lambda = h(t);
  return std::pow(t, 2.0 * lambda) * c_lambda_inv_sq(lambda);
}

double variance_derivative(double t, const HurstFunction& h) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("R'(t) needs t > 0");
  const double lambda = h(t);
  const double dlambda = h.derivative(t);
  const double cinv = c_lambda_inv_sq(lambda);
  const double dcinv = c_lambda_inv_sq_derivative(lambda);
  const double pw = std::pow(t, 2.0 * lambda);
  return pw * (dcinv * dlambda + cinv * 2.0 * (dlambda * std::log(t) + lambda / t));
}

double variance_unnormalized(double t, const HurstFunction& h) {
  check_time(t, "t");
  if (t == 0.0) return 0.0;
  return std::pow(t, 2.0 * h(t));
}

double variance_unnormalized_derivative(double t, const HurstFunction& h) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("derivative needs t > 0");
  const double lambda = h(t);
  return 2.0 * (h.derivative(t) * std::log(t) + lambda / t) * std::pow(t, 2.0 * lambda);
}

double variance_total_variation(double s, double t, const HurstFunction& h, int n) {
  if (n < 2 || !(t > s) || !(s >= 0.0)) throw DomainError("need 0 <= s < t and n >= 2");
  double total = 0.0;
  double prev = variance(s, h);
  for (int k = 1; k < n; ++k) {
    const double u = k + 1 == n ? t : s + (t - s) * k / (n - 1);
    const double cur = variance(u, h);
    total += std::abs(cur - prev);
    prev = cur;
  }
  return total;
}

double increment_second_moment(double s, double t, const HurstFunction& h,
                               const QuadratureSpec& q) {
  check_time(s, "s");
  check_time(t, "t");
  if (s > t) std::swap(s, t);
  q.validate();
  if (s == t) return 0.0;
  const double lt = h(t);
  if (s == 0.0) return variance(t, h);
  const double ls = h(s);
  const QuadratureSpec qi = q.tightened(0.01);

  // K_{lt}(t,u) - K_{ls}(s,u) = u^{1/2-lt} seg(u,s,t) + [K_{lt}(s,u) - K_{ls}(s,u)].
  auto diff = [&](double u) {
    const double head = std::pow(u, 0.5 - lt) * kernel_segment(u, s, t, lt, qi);
    double swap_part = 0.0;
    if (lt != ls) {
      swap_part = std::pow(u, 0.5 - lt) * kernel_segment(u, u, s, lt, qi) -
                  std::pow(u, 0.5 - ls) * kernel_segment(u, u, s, ls, qi);
    }
    const double d = head + swap_part;
    return d * d;
  };
  const double alpha = 1.0 - 2.0 * std::max(lt, ls);
  const double half = 0.5 * s;
  const double lower =
      integrate_left_power([&](double u, double) { return diff(u); }, 0.0, half, alpha, q).value;

  // Near u = s the integrand varies on the scale t - s.
  std::vector<double> pts{s};
  const double d = t - s;
  for (double step = d; s - step > half; step *= 4.0) pts.push_back(s - step);
  pts.push_back(half);
  std::reverse(pts.begin(), pts.end());
  const double upper = integrate(diff, std::span<const double>(pts), q).value;

  return lower + upper + kernel_l2_tail(s, t, lt, q);
}

double increment_moment_bound(double s, double t, const HurstFunction& h, double horizon) {
  check_time(s, "s");
  check_time(t, "t");
  if (s > t) std::swap(s, t);
  const PhiBound& phi = phi_bound_calibration(h.lower(), h.upper(), horizon);
  const double dh = h(t) - h(s);
  const double ls = h(s);
  return 2.0 * phi.l2_norm_sq() * dh * dh +
         2.0 * c_lambda_inv_sq(ls) * std::pow(t - s, 2.0 * ls);
}

namespace {

constexpr int kGramNodes = 24;
constexpr double kGramGrade = 4.0;
constexpr int kGramOriginNodes = 32;

struct GramNode {
  double u;
  double gap;  ///< t_cell - u, formed without cancellation
  double w;
  std::size_t cell;
};

}  // namespace

Eigen::MatrixXd gram_covariance(const TimeGrid& grid, const HurstFunction& h,
                                const QuadratureSpec& q) {
  q.validate();
  const std::size_t n = grid.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
  if (n < 2) return out;
  std::vector<double> lam(n, 0.0);
  double lam_max = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    lam[i] = h(grid[i]);
    lam_max = std::max(lam_max, lam[i]);
  }

  const FixedRule& rule = gauss_legendre_unit(kGramNodes);
  const FixedRule& origin_rule = gauss_legendre_unit(kGramOriginNodes);
  std::vector<GramNode> nodes;
  auto add_right_graded = [&](double lo, double hi, std::size_t cell) {
    const double width = hi - lo;
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
      const double r = rule.x[k];
      const double rp = std::pow(r, kGramGrade);
      const double gap = width * rp;
      nodes.push_back({hi - gap, gap, width * kGramGrade * rp / r * rule.w[k], cell});
    }
  };
  // Near 0 the integrand behaves like u^{1 - l - l'}; grade so that the worst pair
  // becomes at least r^3 in the substituted variable.
  const double origin_grade = std::max(kGramGrade, 4.0 / (2.0 - 2.0 * lam_max));
  const double t1 = grid[1];
  for (std::size_t k = 0; k < origin_rule.x.size(); ++k) {
    const double r = origin_rule.x[k];
    const double rp = std::pow(r, origin_grade);
    const double u = 0.5 * t1 * rp;
    nodes.push_back({u, t1 - u, 0.5 * t1 * origin_grade * rp / r * origin_rule.w[k], 1});
  }
  add_right_graded(0.5 * t1, t1, 1);
  for (std::size_t c = 2; c < n; ++c) add_right_graded(grid[c - 1], grid[c], c);

  // g(i - 1, node) = K_{h(t_i)}(t_i, u_node) for nodes below t_i.
  const auto n_nodes = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n - 1), n_nodes);
  parallel_for(n - 1, [&](std::size_t r) {
    const std::size_t i = r + 1;
    for (Eigen::Index k = 0; k < n_nodes; ++k) {
      const GramNode& node = nodes[static_cast<std::size_t>(k)];
      if (node.cell > i) break;
      const double gap = node.cell == i ? node.gap : grid[i] - node.u;
      g(static_cast<Eigen::Index>(r), k) = volterra_kernel_gap(node.u, gap, lam[i], q);
    }
  });
  Eigen::VectorXd w(n_nodes);
  for (Eigen::Index k = 0; k < n_nodes; ++k) w(k) = nodes[static_cast<std::size_t>(k)].w;
  const Eigen::MatrixXd gw = g * w.asDiagonal();
  Eigen::MatrixXd c = gw * g.transpose();
  out.bottomRightCorner(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1)) =
      0.5 * (c + c.transpose());
  return out;
}

CovarianceMatrix build_cov_matrix(const TimeGrid& grid, const HurstFunction& h,
                                  CovarianceMethod method, const QuadratureSpec& q) {
  q.validate();
  if (method == CovarianceMethod::Empirical) {
    throw ConfigError("the empirical covariance is computed from an ensemble, not built");
  }
  if (method == CovarianceMethod::FbmClosedForm && !h.is_constant()) {
    throw ConfigError("fbm_closed_form requires a constant Hurst function");
  }
  if (method == CovarianceMethod::GramNodes) {
    return CovarianceMatrix{grid, gram_covariance(grid, h, q), method, h.descriptor()};
  }
  const std::size_t n = grid.size();
  CovarianceMatrix out{grid, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n)),
                       method, h.descriptor()};
  std::vector<double> lam(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) lam[i] = h(grid[i]);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 1; j <= i; ++j) pairs.emplace_back(i, j);
  }
  auto& m = out.entries;
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double ti = grid[i], tj = grid[j];
    double v = 0.0;
    try {
      switch (method) {
        case CovarianceMethod::InnerProduct:
          v = cross_cov_inner_product(ti, tj, lam[i], lam[j], q);
          break;
        case CovarianceMethod::DoubleIntegral:
          v = cross_cov_double_integral(ti, tj, lam[i], lam[j], q);
          break;
        case CovarianceMethod::FbmClosedForm:
          v = fbm_covariance(ti, tj, lam[i]);
          break;
        case CovarianceMethod::GramNodes:
        case CovarianceMethod::Empirical:
          break;
      }
    } catch (const ToleranceError& e) {
      throw ToleranceError("covariance entry (" + std::to_string(i) + "," + std::to_string(j) +
                           "): " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("covariance entry (" + std::to_string(i) + "," + std::to_string(j) +
                        "): " + e.what());
    }
    const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
    m(ii, jj) = v;
    m(jj, ii) = v;
  });
  return out;
}

void write_csv(const CovarianceMatrix& cov, std::ostream& out) {
  const auto old = out.precision(17);
  out << "t";
  for (double t : cov.grid.times()) out << ',' << t;
  out << '\n';
  for (Eigen::Index i = 0; i < cov.entries.rows(); ++i) {
    out << cov.grid[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < cov.entries.cols(); ++j) out << ',' << cov.entries(i, j);
    out << '\n';
  }
  out.precision(old);
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double max_relative_discrepancy(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DomainError("matrix shapes differ");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double scale = std::max(std::abs(a(i, j)), std::abs(b(i, j)));
      if (scale == 0.0) continue;
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / scale);
    }
  }
  return worst;
}

}  // namespace mfv
