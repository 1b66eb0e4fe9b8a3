#pragma once

#include <cstddef>
#include <functional>

namespace freqsynth {

// Worker count: hardware concurrency, capped by FREQSYNTH_THREADS when set.
std::size_t worker_count();

// Runs body(i) for i in [0, count). Each index is processed exactly once;
// callers write results into index-addressed slots so output never depends
// on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace freqsynth
