#pragma once

#include <span>
#include <vector>

namespace mfv {

/// Ordered evaluation times 0 = t_0 < t_1 < ... < t_n = T.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);

  /// n_points equally spaced times on [0, horizon] (n_points >= 1; a single point
  /// is the degenerate grid {0}).
  static TimeGrid uniform(double horizon, int n_points);

  std::span<const double> times() const { return times_; }
  double operator[](std::size_t i) const { return times_[i]; }
  std::size_t size() const { return times_.size(); }
  double horizon() const { return times_.back(); }
  /// Index of `t` in the grid, or -1 when it is not a grid time (exact match).
  std::ptrdiff_t index_of(double t) const;

 private:
  std::vector<double> times_;
};

}  // namespace mfv
