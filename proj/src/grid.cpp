#include "mfvolterra/grid.hpp"

#include <algorithm>

#include "mfvolterra/errors.hpp"

namespace mfv {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.empty() || times_.front() != 0.0) {
    throw DomainError("TimeGrid: first time must be exactly 0");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw DomainError("TimeGrid: times must be strictly increasing");
    }
  }
}

TimeGrid TimeGrid::uniform(double horizon, int n_points) {
  if (n_points < 1) throw DomainError("TimeGrid::uniform: need at least one point");
  if (n_points == 1) return TimeGrid({0.0});
  if (!(horizon > 0.0)) throw DomainError("TimeGrid::uniform: horizon must be positive");
  std::vector<double> t(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) t[i] = horizon * i / (n_points - 1);
  t.back() = horizon;
  return TimeGrid(std::move(t));
}

std::ptrdiff_t TimeGrid::index_of(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t) return -1;
  return it - times_.begin();
}

}  // namespace mfv
