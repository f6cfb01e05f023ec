#pragma once

#include <functional>

namespace gpexperts {

// Number of worker threads to use for n_threads requests (0 = all hardware threads).
int resolve_threads(int n_threads);

// Run fn(i) for i in [0, n) on up to n_threads workers. Static contiguous
// chunking; fn must only write to slots owned by index i so the schedule
// cannot change results. Exceptions from workers are rethrown (first one wins).
void parallel_for(int n, int n_threads, const std::function<void(int)>& fn);

}  // namespace gpexperts
