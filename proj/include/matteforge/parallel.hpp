#pragma once

#include <cstddef>
#include <functional>

namespace matteforge {

/// Worker cap: MATTEFORGE_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to
/// `workers` threads. Chunks are disjoint, so bodies that only write to
/// their own index range give schedule-independent results.
void parallel_for(size_t n, int workers, const std::function<void(size_t, size_t)>& body);

}  // namespace matteforge
