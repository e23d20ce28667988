#pragma once

#include <cstddef>
#include <functional>

namespace cclust {

/// Global worker-count cap. 0 means "use hardware concurrency".
/// The CLI sets this from --threads or the CC_THREADS environment variable.
void set_thread_budget(int threads);
int thread_budget();

/// Run fn(i) for i in [begin, end) across the thread budget. Work is split
/// into contiguous blocks so results written to per-index slots are
/// identical regardless of worker count. Exceptions propagate to the caller.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace cclust
