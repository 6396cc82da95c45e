#pragma once

#include <functional>

namespace conewave {

/// Worker count: min(hardware concurrency, 8), capped by the CONEWAVE_THREADS
/// environment variable when set.
int worker_count();

/// Runs fn(i) for i in [0, n).  Each index must write only its own outputs;
/// results are then independent of the thread count, keeping reports
/// byte-reproducible.  Nested calls run serially.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace conewave
