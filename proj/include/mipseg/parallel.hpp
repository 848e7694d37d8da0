#pragma once

#include <cstdint>
#include <functional>

namespace mipseg {

/// Worker count used by the conv kernels; 1 (the default) runs everything
/// on the calling thread. Work is split into per-thread ranges whose inner
/// reductions keep a fixed order, so results are bitwise identical for any
/// thread count.
void set_thread_count(int n);
int thread_count();

/// Runs fn(begin, end) over a partition of [0, n) into contiguous ranges.
void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace mipseg
