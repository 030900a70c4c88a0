#include "mfvolterra/hurst.hpp"

#include <algorithm>
#include <cmath>

// Boost 1.74's pchip.hpp calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>
#include <sstream>

#include "mfvolterra/errors.hpp"

namespace mfv {
namespace {

constexpr double kBoundSlack = 1e-12;

void check_bounds(double lo, double hi) {
  if (!(lo > 0.5 && lo <= hi && hi < 1.0)) {
    std::ostringstream os;
    os << "Hurst bounds [" << lo << ", " << hi
       << "] must satisfy 1/2 < a <= b < 1 (values in (1/2,1))";
    throw DomainError(os.str());
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(HurstShape shape) {
  switch (shape) {
    case HurstShape::Constant: return "constant";
    case HurstShape::AffineClamped: return "affine_clamped";
    case HurstShape::Sinusoidal: return "sinusoidal";
    case HurstShape::TableInterpolated: return "table";
    case HurstShape::Custom: return "custom";
  }
  return "unknown";
}

HurstFunction::HurstFunction(HurstShape shape, std::function<double(double)> value,
                             std::function<double(double)> derivative, double lo, double hi,
                             std::string descriptor)
    : shape_(shape),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      lower_(lo),
      upper_(hi),
      descriptor_(std::move(descriptor)) {
  check_bounds(lo, hi);
}

HurstFunction HurstFunction::constant(double value) {
  return HurstFunction(
      HurstShape::Constant, [value](double) { return value; }, [](double) { return 0.0; },
      value, value, "constant(" + fmt(value) + ")");
}

HurstFunction HurstFunction::affine_clamped(double h0, double slope, double lo, double hi) {
  check_bounds(lo, hi);
  auto value = [=](double t) { return std::clamp(h0 + slope * t, lo, hi); };
  auto derivative = [=](double t) {
    const double raw = h0 + slope * t;
    return (raw > lo && raw < hi) ? slope : 0.0;
  };
  return HurstFunction(HurstShape::AffineClamped, value, derivative, lo, hi,
                       "affine_clamped(h0=" + fmt(h0) + ", slope=" + fmt(slope) + ", [" +
                           fmt(lo) + ", " + fmt(hi) + "])");
}

HurstFunction HurstFunction::sinusoidal(double mean, double amplitude, double omega,
                                        double phase) {
  return sinusoidal(mean, amplitude, omega, phase, mean - std::abs(amplitude),
                    mean + std::abs(amplitude));
}

HurstFunction HurstFunction::sinusoidal(double mean, double amplitude, double omega,
                                        double phase, double lo, double hi) {
  if (mean - std::abs(amplitude) < lo - kBoundSlack ||
      mean + std::abs(amplitude) > hi + kBoundSlack) {
    throw DomainError("sinusoidal Hurst function: mean +- amplitude must lie inside [a, b]");
  }
  auto value = [=](double t) { return mean + amplitude * std::sin(omega * t + phase); };
  auto derivative = [=](double t) { return amplitude * omega * std::cos(omega * t + phase); };
  return HurstFunction(HurstShape::Sinusoidal, value, derivative, lo, hi,
                       "sinusoidal(mean=" + fmt(mean) + ", amplitude=" + fmt(amplitude) +
                           ", omega=" + fmt(omega) + ", phase=" + fmt(phase) + ")");
}

HurstFunction HurstFunction::table(std::vector<double> times, std::vector<double> values,
                                   bool differentiable) {
  if (times.size() != values.size() || times.size() < 4) {
    throw DomainError("table Hurst function: need at least 4 (time, value) pairs");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw DomainError("table Hurst function: times must be strictly increasing");
    }
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn, hi = *mx;
  check_bounds(lo, hi);
  const double t_first = times.front(), t_last = times.back();
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::move(times), std::move(values));
  // PCHIP is monotone between knots, so it never leaves [min, max] of the table.
  auto value = [spline, t_first, t_last](double t) {
    return (*spline)(std::clamp(t, t_first, t_last));
  };
  std::function<double(double)> derivative;
  if (differentiable) {
    derivative = [spline, t_first, t_last](double t) {
      if (t < t_first || t > t_last) return 0.0;
      return spline->prime(t);
    };
  }
  return HurstFunction(HurstShape::TableInterpolated, value, derivative, lo, hi,
                       std::string("table(pchip") + (differentiable ? ")" : ", no derivative)"));
}

HurstFunction HurstFunction::custom(std::function<double(double)> value,
                                    std::function<double(double)> derivative, double lo,
                                    double hi, std::string label) {
  return HurstFunction(HurstShape::Custom, std::move(value), std::move(derivative), lo, hi,
                       std::move(label));
}

double HurstFunction::operator()(double t) const {
  const double v = value_(t);
  if (!(v >= lower_ - kBoundSlack && v <= upper_ + kBoundSlack)) {
    std::ostringstream os;
    os << "Hurst function " << descriptor_ << " left its bounds [" << lower_ << ", " << upper_
       << "] at t=" << t << " (value " << v << ")";
    throw DomainError(os.str());
  }
  return v;
}

double HurstFunction::derivative(double t) const {
  if (!derivative_) {
    throw DomainError("Hurst function " + descriptor_ + " is not flagged differentiable");
  }
  const double d = derivative_(t);
  if (!std::isfinite(d)) throw DomainError("Hurst derivative is not finite");
  return d;
}

double HurstFunction::variation(double s, double t, int n) const {
  if (is_constant() || !(t > s)) return 0.0;
  double total = 0.0;
  double prev = (*this)(s);
  for (int i = 1; i < n; ++i) {
    const double cur = (*this)(s + (t - s) * i / (n - 1));
    total += std::abs(cur - prev);
    prev = cur;
  }
  return total;
}

}  // namespace mfv
