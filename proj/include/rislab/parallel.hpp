#pragma once

#include <cstddef>
#include <functional>

namespace rislab {

// Calls task(i) for every i in [0, count) using up to `threads` workers. Tasks
// must write only to their own slots; callers reduce afterwards in index order.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

// Worker count from an explicit request, the RIS_LAB_THREADS variable, or the hardware.
int resolve_threads(int requested);

}  // namespace rislab
