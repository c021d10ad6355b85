#ifndef MDM_PARALLEL_HPP
#define MDM_PARALLEL_HPP

#include <functional>

namespace mdm {

// Runs fn(0..n-1) on up to `threads` workers pulling indices from a shared
// counter. Callers must write results into per-index slots and aggregate
// in index order afterwards, which keeps every derived number independent of
// the thread count. threads <= 1 (or n < 2) runs inline. An exception thrown
// by any invocation is rethrown on the calling thread.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

// Resolves a thread-count request: n > 0 is taken as-is, n <= 0 falls back to
// the MDM_THREADS environment variable and then to 1.
int resolve_threads(int requested);

}  // namespace mdm

#endif
