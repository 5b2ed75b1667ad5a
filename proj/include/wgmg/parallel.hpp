#pragma once

#include <functional>

namespace wgmg {

/// Worker count from WGMG_THREADS (default 1).
int worker_count();

/// Splits [0, n) into contiguous chunks, one per worker, and runs
/// fn(begin, end, worker) on each. Chunk w always precedes chunk w+1, so
/// buffers concatenated in worker order match a serial traversal.
void parallel_chunks(long n, const std::function<void(long, long, int)>& fn, int workers = worker_count());

}  // namespace wgmg
