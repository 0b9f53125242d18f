#pragma once

// Data-parallel reduction kernels.
//
// Every kernel has two paths: a plain serial loop kept as the reference, and an
// OpenMP path that reduces over fixed-size blocks and combines the partial
// results in block order. The block layout does not depend on the thread
// count, so the OpenMP path returns bit-identical results for any number of
// threads (including one).

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sgn {

enum class Execution { Serial, Parallel };

namespace kernels {

inline constexpr std::size_t kDefaultBlock = 128;

/// Reduce body(begin, end, acc) over [0, n).
///
/// Serial: one accumulator over the whole range. Parallel: one accumulator per
/// block of `block` indices, summed in block order.
template <class Acc, class Body>
Acc blocked_reduce(Execution exec, std::size_t n, const Acc& zero, Body&& body,
                   std::size_t block = kDefaultBlock) {
  if (exec == Execution::Serial) {
    Acc acc = zero;
    body(std::size_t{0}, n, acc);
    return acc;
  }
  const std::size_t nblocks = (n + block - 1) / block;
  std::vector<Acc> partial(nblocks, zero);
  // Exceptions cannot leave an OpenMP region; keep the one from the lowest block.
  std::vector<std::exception_ptr> errors(nblocks);
  const auto nb = static_cast<long long>(nblocks);
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < nb; ++k) {
    const auto kb = static_cast<std::size_t>(k);
    const std::size_t begin = kb * block;
    const std::size_t end = begin + block < n ? begin + block : n;
    try {
      body(begin, end, partial[kb]);
    } catch (...) {
      errors[kb] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  Acc acc = zero;
  for (const Acc& p : partial) acc += p;
  return acc;
}

/// Number of threads the OpenMP runtime would use for a parallel region.
inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace kernels
}  // namespace sgn
