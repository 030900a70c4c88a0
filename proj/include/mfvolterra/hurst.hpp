#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mfv {

enum class HurstShape { Constant, AffineClamped, Sinusoidal, TableInterpolated, Custom };

std::string to_string(HurstShape shape);

/// A Hurst function h: [0, inf) -> [a, b] with 1/2 < a <= b < 1.
///
/// Every evaluation re-checks that the value stays inside the declared bounds and
/// throws DomainError otherwise. All shipped shapes are Lipschitz (Hoelder
/// exponent 1 > sup h).
class HurstFunction {
 public:
  static HurstFunction constant(double value);
  /// clamp(h0 + slope * t, lo, hi).
  static HurstFunction affine_clamped(double h0, double slope, double lo, double hi);
  /// mean + amplitude * sin(omega * t + phase); bounds default to mean +- |amplitude|.
  static HurstFunction sinusoidal(double mean, double amplitude, double omega, double phase);
  static HurstFunction sinusoidal(double mean, double amplitude, double omega, double phase,
                                  double lo, double hi);
  /// Monotone cubic (PCHIP) interpolation through (times, values), held constant
  /// outside the table. `differentiable` = false hides the derivative.
  static HurstFunction table(std::vector<double> times, std::vector<double> values,
                             bool differentiable = true);
  static HurstFunction custom(std::function<double(double)> value,
                              std::function<double(double)> derivative, double lo, double hi,
                              std::string label);

  double operator()(double t) const;
  /// h'(t); throws DomainError when the function is not flagged differentiable.
  double derivative(double t) const;

  bool differentiable() const { return static_cast<bool>(derivative_); }
  bool is_constant() const { return shape_ == HurstShape::Constant; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double holder_exponent() const { return holder_; }
  HurstShape shape() const { return shape_; }
  const std::string& descriptor() const { return descriptor_; }

  /// Total variation of h on [s, t] over a uniform n-point partition.
  double variation(double s, double t, int n = 4096) const;

 private:
  HurstFunction(HurstShape shape, std::function<double(double)> value,
                std::function<double(double)> derivative, double lo, double hi,
                std::string descriptor);

  HurstShape shape_;
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
  double lower_;
  double upper_;
  double holder_ = 1.0;
  std::string descriptor_;
};

}  // namespace mfv
