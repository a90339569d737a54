#pragma once

#include <cstddef>
#include <functional>

namespace gridformer {

/// Worker count: min(hardware_concurrency, GRIDFORMER_THREADS). The
/// environment variable caps parallelism; 1 forces serial execution.
int thread_budget();

/// Runs body(i) for i in [0, count). Indices are distributed over the
/// thread budget; the body must only write to its own slot. Falls back
/// to a plain loop for small counts.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace gridformer
