#pragma once

#include <cstddef>
#include <functional>

namespace filminfo {

/// Upper bound on worker threads used by parallel_for (0 = hardware default).
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs body(i) for i in [0, n) across up to max_threads() workers. The first
/// exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace filminfo
