#pragma once

#include <cstddef>
#include <functional>

namespace monodromy {

/// Worker count: MG_NUM_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Each
/// index runs exactly once; the first exception is rethrown after all join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace monodromy
