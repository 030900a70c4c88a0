#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace mfv {

/// Worker count: MFVOLTERRA_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n). Work is handed out in fixed-size blocks, so each
/// index is processed by exactly one call regardless of the number of workers;
/// results written per index are therefore identical for any thread count. If
/// any call throws, the exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mfv
