#pragma once

#include <functional>

namespace lrbms {

/// Thread count from the LRBMS_THREADS environment variable, 1 if unset or invalid.
int default_threads();

/// Runs body(i) for i in [0, n) on up to `threads` threads with a static
/// contiguous split. Every index is processed exactly once; results written to
/// per-index slots are therefore independent of the thread count. The first
/// exception thrown by any body is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace lrbms
