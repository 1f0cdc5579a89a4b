#pragma once

#include <cstddef>
#include <functional>

namespace mkt {

/// Number of worker threads: MKT_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Calls fn(i) for i in [0, n). Work is split into contiguous blocks, one per worker;
/// fn must only write to per-index state so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mkt
