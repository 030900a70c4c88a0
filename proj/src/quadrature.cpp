#include "mfvolterra/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <sstream>

namespace mfv {

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 8) {
    throw DomainError(
        "QuadratureSpec: need abs_tol > 0, rel_tol > 0 and max_subdivisions >= 8");
  }
}

QuadratureSpec QuadratureSpec::tightened(double factor) const {
  QuadratureSpec out = *this;
  out.abs_tol = std::max(abs_tol * factor, 1e-16);
  out.rel_tol = std::max(rel_tol * factor, 1e-15);
  return out;
}

namespace {

template <int N>
FixedRule make_gauss_legendre() {
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  FixedRule out;
  // Boost stores the non-negative half (N even: no zero node).
  for (std::size_t i = x.size(); i-- > 0;) {
    out.x.push_back(0.5 - 0.5 * x[i]);
    out.w.push_back(0.5 * w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.x.push_back(0.5 + 0.5 * x[i]);
    out.w.push_back(0.5 * w[i]);
  }
  return out;
}

}  // namespace

const FixedRule& gauss_legendre_unit(int n) {
  static const FixedRule r16 = make_gauss_legendre<16>();
  static const FixedRule r24 = make_gauss_legendre<24>();
  static const FixedRule r32 = make_gauss_legendre<32>();
  switch (n) {
    case 16: return r16;
    case 24: return r24;
    case 32: return r32;
    default: throw DomainError("gauss_legendre_unit: supported sizes are 16, 24, 32");
  }
}

namespace detail {

const GK21& gk21() {
  static const GK21 rule = [] {
    GK21 r;
    const auto& x = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
    const auto& wk = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
    const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
    std::copy(x.begin(), x.end(), r.x.begin());
    std::copy(wk.begin(), wk.end(), r.wk.begin());
    std::copy(wg.begin(), wg.end(), r.wg.begin());
    return r;
  }();
  return rule;
}

void throw_tolerance(double value, double error, double target, int panels) {
  std::ostringstream os;
  os << "quadrature tolerance not met after " << panels << " panels: estimate " << value
     << ", error " << error << " > target " << target;
  throw ToleranceError(os.str());
}

}  // namespace detail
}  // namespace mfv
