#pragma once

#include <cstddef>
#include <functional>

namespace focklab {

/// Worker count: FOCKLAB_THREADS if set (>= 1), else hardware concurrency.
unsigned thread_count();

/// Calls fn(i) for i in [0, n) using static contiguous chunks. Callers write
/// results into per-index slots and reduce afterwards, so the outcome does
/// not depend on the number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace focklab
