#pragma once

#include <cstddef>
#include <functional>

namespace hlab {

// Number of worker threads used by parallel loops (default 1).
void set_threads(int n);
int threads();

// Splits [0, n) into contiguous chunks, one per worker. Each index is processed
// by exactly one call of fn, so per-index results do not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace hlab
