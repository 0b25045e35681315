#pragma once

#include <cstddef>
#include <functional>

namespace latent {

/// Upper bound on worker threads used by batch operations (default 1).
void set_thread_limit(unsigned n);
unsigned thread_limit();

/// Runs fn(i) for i in [0, n). Calls made from inside a worker run inline.
/// Work is split into contiguous index blocks;
/// every index is processed exactly once, so results written per index do not
/// depend on the thread count. If any call throws, the exception from the
/// lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace latent
