#pragma once

#include <cstddef>
#include <functional>

namespace oaknee {

/// Worker count: OAKNEE_THREADS if set (>= 1), else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Work is split into contiguous blocks, one per
/// worker; callers that reduce must do so over a partition that does not
/// depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace oaknee
