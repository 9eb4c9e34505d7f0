#pragma once

#include <cstddef>
#include <functional>

namespace ctiler {

/// Worker count resolution: CASCADE_TILER_THREADS env var wins, then the
/// requested count, then hardware concurrency. Always >= 1.
int resolve_workers(int requested);

/// Run fn(i) for i in [0, count) on up to `workers` threads. Callers index
/// into preallocated output slots, so results are identical for any worker
/// count. Exceptions are captured and rethrown on the calling thread.
void parallel_for(size_t count, int workers, const std::function<void(size_t)>& fn);

} // namespace ctiler
