#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace scheq {

// Worker count from SCHEQ_THREADS, else the hardware concurrency.
int default_threads();

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work is split in
// contiguous blocks; callers write results into index-addressed slots, so the
// outcome never depends on the worker count. The first exception is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// Deterministic pairwise-tree sum.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace scheq
