#pragma once

#include <functional>

namespace edfm {

/// Worker count from EDFM_NUM_THREADS (default 1).
int num_threads();

/// Runs body(i) for i in [0, n) on num_threads() threads with static
/// chunking. The first exception thrown by any worker is rethrown.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace edfm
