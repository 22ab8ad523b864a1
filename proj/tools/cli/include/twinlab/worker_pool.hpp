#pragma once

#include <cstddef>
#include <functional>

namespace twinlab {

// TWINLAB_WORKERS if set to a positive integer, else the hardware concurrency (at least 1).
std::size_t worker_count();

// Runs task(0..count-1) on at most `workers` threads. Each index runs exactly once; the
// first exception (lowest index) is rethrown after all threads finish.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task);

}  // namespace twinlab
