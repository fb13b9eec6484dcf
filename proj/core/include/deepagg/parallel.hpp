#pragma once

#include <cstddef>
#include <functional>

namespace deepagg {

/// Hardware concurrency, capped by the DEEPAGG_THREADS environment variable
/// when it holds a positive integer. Always >= 1.
std::size_t worker_count();

/// Calls fn(i) for i in [0, n) across up to worker_count() threads. fn must
/// not throw; callers capture their own per-item errors.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace deepagg
