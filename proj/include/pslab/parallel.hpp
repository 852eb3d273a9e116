#pragma once

#include <cstddef>
#include <functional>

namespace pslab {

/// Worker count used by the library. 0 means "not set": PSLAB_THREADS if it holds a
/// positive integer, else the number of logical cores.
void set_thread_count(int threads);
int thread_count();

/// Runs fn(i) for i in [0, count) on up to thread_count() workers. Each index is handled
/// exactly once; callers write results into per-index slots, so output does not depend
/// on scheduling. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace pslab
