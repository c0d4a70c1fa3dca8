#pragma once

#include <functional>

namespace decaf {

/// Worker cap shared by every parallel region: hardware concurrency, clamped
/// by the DECAF_THREADS environment variable when set. Always >= 1.
int thread_count();

/// Runs fn(begin, end) over disjoint chunks of [0, n). Chunks are contiguous
/// and assigned in index order, so callers that reduce per-chunk results in
/// chunk order get deterministic totals regardless of scheduling.
void parallel_for(int n, const std::function<void(int, int)>& fn);

}  // namespace decaf
