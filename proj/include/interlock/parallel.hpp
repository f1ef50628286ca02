#pragma once

#include <cstddef>
#include <functional>

namespace interlock {

// Splits [0, count) into at most `jobs` contiguous chunks and runs
// fn(lo, hi) on each, one thread per chunk. Results must be written to
// disjoint, preallocated slots so the outcome is independent of the thread
// count. The first exception is rethrown in the calling thread.
void parallel_chunks(std::size_t count, int jobs,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace interlock
