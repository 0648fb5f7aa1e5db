#pragma once

#include <cstdint>
#include <functional>

namespace zagff {

/// Worker count: ZAGFF_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, count) across up to `workers` threads
/// (0 = worker_count()). Indices are claimed dynamically; callers write
/// results into per-index slots so the outcome never depends on scheduling.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body, int workers = 0);

}  // namespace zagff
