#pragma once

#include <cstddef>
#include <functional>

namespace cutguard {

// Worker cap: CUTGUARD_THREADS when set (minimum 1), otherwise
// hardware_concurrency.
std::size_t max_threads();

// Runs fn(0..n-1) across up to max_threads() workers in contiguous chunks.
// Callers keep determinism by writing results into index-addressed slots and
// reducing serially afterwards. Exceptions from workers are rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace cutguard
