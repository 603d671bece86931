#pragma once

#include <cstddef>
#include <functional>

namespace rodessa {

/// Number of hardware threads, at least 1.
unsigned default_jobs();

/// Calls body(i) for i in [0, n) on up to `jobs` threads. Indices are handed
/// out dynamically, so body must write only to slot i of its output. The first
/// exception thrown by any call is rethrown after all threads finish.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace rodessa
