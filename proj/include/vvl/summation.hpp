#pragma once
// Reductions whose result depends only on the element count, never on
// how the work is split between threads.

#include <cstddef>
#include <span>
#include <vector>

namespace vvl {

// Pairwise (cascade) summation with a fixed tree: split at n/2 until blocks
// of at most 32 elements, summed left to right.
double pairwise_sum(std::span<const double> values);

// Sum of f(i) for i in [0, n). Elements are evaluated in parallel into a
// buffer, then reduced with pairwise_sum, so the result is bit-identical for
// any OpenMP thread count.
template <class F>
double deterministic_sum(std::size_t n, F&& f) {
  std::vector<double> buffer(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) buffer[i] = f(static_cast<std::size_t>(i));
  return pairwise_sum(buffer);
}

}  // namespace vvl
