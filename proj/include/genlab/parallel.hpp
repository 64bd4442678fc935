#pragma once

#include <cstddef>
#include <functional>

namespace genlab {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work is split
// into contiguous blocks; the first exception thrown is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace genlab
