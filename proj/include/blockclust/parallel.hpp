#pragma once

#include <cstddef>
#include <functional>

namespace blockclust {

// Worker count: min(hardware_concurrency, BLOCKCLUST_THREADS if set).
// Always at least 1.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous ranges, one
// per worker; each index is processed by exactly one thread, so writes to
// per-index slots are race-free and results are bit-deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace blockclust
