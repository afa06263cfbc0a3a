#pragma once

#include <functional>

namespace fedsim {

/// Runs fn(0..n-1) across up to `workers` threads. Results must be written
/// to per-index slots by the caller; the first exception thrown by any task
/// is rethrown after all threads join.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace fedsim
