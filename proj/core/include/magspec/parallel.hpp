#pragma once

#include <cstddef>
#include <functional>

namespace magspec {

/// Runs body(i) for i in [0, n) on up to `threads` workers with static
/// chunking. Results must be written by index so the outcome does not
/// depend on scheduling. Exceptions are rethrown on the caller.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

int hardware_threads();

} // namespace magspec
