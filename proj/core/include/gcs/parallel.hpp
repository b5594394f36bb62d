#pragma once

#include <cstddef>
#include <functional>

namespace gcs {

// Worker count: hardware concurrency capped by the GCS_THREADS environment
// variable (values < 1 mean serial execution).
std::size_t thread_cap();

// Runs fn(i) for every i in [0, count) on up to thread_cap() workers and
// blocks until all complete. Workers must write to disjoint state. If any
// invocation throws, the exception for the smallest index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace gcs
