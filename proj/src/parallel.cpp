#include "pwt/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdint>
#include <algorithm>

namespace pwt::parallel {

namespace {
std::atomic<std::size_t> g_grain{std::size_t{1} << 13};
}

void set_num_threads(int n) {
  if (n <= 0) n = omp_get_num_procs();
  omp_set_num_threads(n);
}

int num_threads() { return omp_get_max_threads(); }

void set_grain(std::size_t g) { g_grain.store(std::max<std::size_t>(g, 1)); }

std::size_t grain() { return g_grain.load(std::memory_order_relaxed); }

bool in_parallel() { return omp_in_parallel() != 0; }

namespace detail {

bool run_parallel(std::size_t work) { return work > 1 && omp_get_max_threads() > 1 && !omp_in_parallel(); }

void omp_for(std::size_t lo, std::size_t hi, void* ctx, void (*body)(void*, std::size_t, std::size_t)) {
  const std::size_t n = hi - lo;
  const std::size_t want = static_cast<std::size_t>(omp_get_max_threads()) * 8;
  const std::size_t chunks = std::min(n, want);
  const auto nc = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < nc; ++c) {
    const std::size_t clo = lo + n * static_cast<std::size_t>(c) / chunks;
    const std::size_t chi = lo + n * static_cast<std::size_t>(c + 1) / chunks;
    body(ctx, clo, chi);
  }
}

}  // namespace detail

}  // namespace pwt::parallel
