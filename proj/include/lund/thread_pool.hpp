#pragma once

#include <cstddef>
#include <functional>

namespace lund {

// Worker count for data-parallel loops: LUND_THREADS if set (clamped to at
// least 1), otherwise std::thread::hardware_concurrency().
unsigned worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads. Static chunked
// partition; rerunning with the same inputs touches the same slots in the
// same per-slot order, so results are reproducible as long as distinct i
// write to distinct locations.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lund
