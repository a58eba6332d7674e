#pragma once

#include <cstddef>
#include <functional>

namespace evoforecast {

// Worker count: EVOFORECAST_THREADS if set (clamped to >= 1), otherwise
// std::thread::hardware_concurrency().
std::size_t thread_count();

// Runs fn(i) for i in [0, n). Work items must be independent; each writes
// only its own output slot, so results do not depend on the thread count.
// Executes inline when n or the thread count is small. The first exception
// thrown by any item is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace evoforecast
