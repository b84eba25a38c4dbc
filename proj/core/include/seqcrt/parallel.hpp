#pragma once

#include <cstddef>
#include <functional>

namespace seqcrt {

/// Worker count: SEQCRT_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 = worker_count()).
/// Indices are claimed dynamically; callers write results into per-index slots so the
/// outcome does not depend on scheduling. The first exception thrown by a body is
/// rethrown after all workers finish. Calls made from inside a worker run inline.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  int workers = 0);

}  // namespace seqcrt
