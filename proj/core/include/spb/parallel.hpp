#pragma once

#include <cstddef>
#include <functional>

namespace spb {

// SUBSPACE_PERTURB_THREADS when set to a positive integer, otherwise the
// hardware concurrency. Never less than 1.
unsigned thread_budget();

// Runs fn(0..count-1) on up to `threads` workers (0 = thread_budget()). If any
// call throws, the exception from the lowest failing index is rethrown after
// all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

}  // namespace spb
