#pragma once

#include <cstddef>
#include <functional>

namespace gapmeans {

// Worker count used by parallel_for. Defaults to the hardware concurrency;
// results of every library routine are independent of this value.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index is executed exactly once; callers
// write results into per-index slots and reduce in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gapmeans
