#pragma once

#include <cstddef>
#include <functional>

namespace ringbdg {

// Worker count from RINGBDG_THREADS, else hardware concurrency (at least 1).
unsigned worker_count();

// Calls body(i) for i in [0, count) across worker threads. Each index runs
// exactly once; callers write results into slot i so merging follows input
// order. The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ringbdg
