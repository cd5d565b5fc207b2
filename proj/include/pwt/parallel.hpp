#pragma once

// Fork-join building blocks: parallel loops, prefix sum, filter and a stable
// LSD radix sort. Every routine returns the same result for every thread
// count; block decompositions depend only on the input size.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pwt/error.hpp"

namespace pwt::parallel {

/// Sets the worker count for subsequent calls. `n <= 0` selects the
/// hardware default.
void set_num_threads(int n);
int num_threads();

/// Loops shorter than the grain run sequentially. Default 2^13.
void set_grain(std::size_t g);
std::size_t grain();

/// True inside a parallel region. Nested loops run sequentially.
bool in_parallel();

namespace detail {
bool run_parallel(std::size_t work);
// Runs body(ctx, chunk_lo, chunk_hi) over a chunked decomposition of [lo, hi).
void omp_for(std::size_t lo, std::size_t hi, void* ctx, void (*body)(void*, std::size_t, std::size_t));
}  // namespace detail

/// Calls f(i) for i in [lo, hi). Runs in parallel when the range is at
/// least `min_parallel` long.
template <class F>
void parallel_for(std::size_t lo, std::size_t hi, F&& f, std::size_t min_parallel = grain()) {
  if (hi <= lo) return;
  if (hi - lo < min_parallel || !detail::run_parallel(hi - lo)) {
    for (std::size_t i = lo; i < hi; ++i) f(i);
    return;
  }
  auto body = [](void* ctx, std::size_t clo, std::size_t chi) {
    auto& fn = *static_cast<std::remove_reference_t<F>*>(ctx);
    for (std::size_t i = clo; i < chi; ++i) fn(i);
  };
  detail::omp_for(lo, hi, const_cast<void*>(static_cast<const void*>(&f)), body);
}

/// Number of fixed-size blocks used to decompose a loop of length n.
inline std::size_t block_size_for(std::size_t n) {
  return std::max<std::size_t>(grain(), (n + 1023) / 1024);
}

/// Calls f(b, lo, hi) for each block [lo, hi) of a size-n range. Blocks run
/// in parallel when n reaches the grain.
template <class F>
void for_blocks(std::size_t n, std::size_t block, F&& f) {
  if (n == 0) return;
  const std::size_t nb = (n + block - 1) / block;
  auto one = [&](std::size_t b) { f(b, b * block, std::min(n, (b + 1) * block)); };
  if (n < grain()) {
    for (std::size_t b = 0; b < nb; ++b) one(b);
  } else {
    parallel_for(0, nb, one, 2);
  }
}

/// In-place exclusive scan; returns the total. Throws kOverflow when the sum
/// does not fit in T.
template <class T>
T exclusive_scan_inplace(std::span<T> x) {
  const std::size_t n = x.size();
  if (n == 0) return T{0};
  const std::size_t block = block_size_for(n);
  const std::size_t nb = (n + block - 1) / block;
  std::vector<T> sums(nb, T{0});
  std::vector<std::uint8_t> overflow(nb, 0);
  for_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    T s{0};
    for (std::size_t i = lo; i < hi; ++i) {
      if (__builtin_add_overflow(s, x[i], &s)) overflow[b] = 1;
    }
    sums[b] = s;
  });
  T total{0};
  for (std::size_t b = 0; b < nb; ++b) {
    T v = sums[b];
    sums[b] = total;
    if (overflow[b] || __builtin_add_overflow(total, v, &total)) {
      fail(ErrorCode::kOverflow, "prefix sum overflow");
    }
  }
  for_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    T s = sums[b];
    for (std::size_t i = lo; i < hi; ++i) {
      T v = x[i];
      x[i] = s;
      s += v;
    }
  });
  return total;
}

/// Exclusive prefix sum with identity 0. Returns (offsets, total).
template <class T>
std::pair<std::vector<T>, T> prefix_sum(std::span<const T> x) {
  std::vector<T> out(x.begin(), x.end());
  T total = exclusive_scan_inplace(std::span<T>(out));
  return {std::move(out), total};
}

/// Order-preserving selection of the elements satisfying pred.
template <class T, class Pred>
std::vector<T> filter(std::span<const T> x, Pred&& pred) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t block = block_size_for(n);
  const std::size_t nb = (n + block - 1) / block;
  std::vector<std::size_t> counts(nb, 0);
  for_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    std::size_t c = 0;
    for (std::size_t i = lo; i < hi; ++i) c += pred(x[i]) ? 1 : 0;
    counts[b] = c;
  });
  const std::size_t total = exclusive_scan_inplace(std::span<std::size_t>(counts));
  std::vector<T> out(total);
  for_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    std::size_t o = counts[b];
    for (std::size_t i = lo; i < hi; ++i) {
      if (pred(x[i])) out[o++] = x[i];
    }
  });
  return out;
}

/// Indices i in [0, n) with pred(i), ascending.
template <class Pred>
std::vector<std::uint64_t> pack_index(std::size_t n, Pred&& pred) {
  if (n == 0) return {};
  const std::size_t block = block_size_for(n);
  const std::size_t nb = (n + block - 1) / block;
  std::vector<std::size_t> counts(nb, 0);
  for_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    std::size_t c = 0;
    for (std::size_t i = lo; i < hi; ++i) c += pred(i) ? 1 : 0;
    counts[b] = c;
  });
  const std::size_t total = exclusive_scan_inplace(std::span<std::size_t>(counts));
  std::vector<std::uint64_t> out(total);
  for_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    std::size_t o = counts[b];
    for (std::size_t i = lo; i < hi; ++i) {
      if (pred(i)) out[o++] = i;
    }
  });
  return out;
}

/// Stable two-way split: elements with is_one(x) == false first. Returns the
/// number of such elements. `out` must have the size of `in`.
template <class T, class Pred>
std::size_t stable_partition_into(std::span<const T> in, std::span<T> out, Pred&& is_one) {
  const std::size_t n = in.size();
  if (n < grain()) {
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < n; ++i) zeros += is_one(in[i]) ? 0 : 1;
    std::size_t z = 0, o = zeros;
    for (std::size_t i = 0; i < n; ++i) {
      if (is_one(in[i])) out[o++] = in[i];
      else out[z++] = in[i];
    }
    return zeros;
  }
  const std::size_t block = block_size_for(n);
  const std::size_t nb = (n + block - 1) / block;
  std::vector<std::size_t> zc(nb, 0);
  for_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    std::size_t c = 0;
    for (std::size_t i = lo; i < hi; ++i) c += is_one(in[i]) ? 0 : 1;
    zc[b] = c;
  });
  const std::size_t zeros = exclusive_scan_inplace(std::span<std::size_t>(zc));
  for_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    std::size_t z = zc[b];
    std::size_t o = zeros + (lo - zc[b]);
    for (std::size_t i = lo; i < hi; ++i) {
      if (is_one(in[i])) out[o++] = in[i];
      else out[z++] = in[i];
    }
  });
  return zeros;
}

namespace detail {

// One stable counting-sort pass on a digit of at most 8 bits.
template <class T, class Digit>
void radix_pass(std::span<const T> in, std::span<T> out, unsigned digit_bits, Digit&& digit) {
  const std::size_t n = in.size();
  const std::size_t radix = std::size_t{1} << digit_bits;
  if (n < grain()) {
    std::array<std::size_t, 257> count{};
    for (std::size_t i = 0; i < n; ++i) ++count[digit(in[i]) + 1];
    for (std::size_t d = 0; d < radix; ++d) count[d + 1] += count[d];
    for (std::size_t i = 0; i < n; ++i) out[count[digit(in[i])]++] = in[i];
    return;
  }
  const std::size_t block = block_size_for(n);
  const std::size_t nb = (n + block - 1) / block;
  std::vector<std::size_t> hist(nb * radix, 0);
  for_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    std::size_t* h = hist.data() + b * radix;
    for (std::size_t i = lo; i < hi; ++i) ++h[digit(in[i])];
  });
  // Column-major exclusive scan: all blocks of digit 0, then digit 1, ...
  std::size_t run = 0;
  for (std::size_t d = 0; d < radix; ++d) {
    for (std::size_t b = 0; b < nb; ++b) {
      std::size_t v = hist[b * radix + d];
      hist[b * radix + d] = run;
      run += v;
    }
  }
  for_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    std::size_t* h = hist.data() + b * radix;
    for (std::size_t i = lo; i < hi; ++i) out[h[digit(in[i])]++] = in[i];
  });
}

}  // namespace detail

/// Stable LSD radix sort of `in` into `out` by key(x), a value below
/// 2^key_bits. Uses 8-bit digits.
template <class T, class Key>
void stable_sort_by_key_into(std::span<const T> in, std::span<T> out, unsigned key_bits, Key&& key) {
  if (key_bits == 0) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  const unsigned passes = (key_bits + 7) / 8;
  std::vector<T> tmp;
  if (passes > 1) tmp.resize(in.size());
  std::span<T> bufs[2] = {out, std::span<T>(tmp)};
  // Choose the first target so that the last pass lands in `out`.
  unsigned target = (passes % 2 == 1) ? 0 : 1;
  std::span<const T> src = in;
  for (unsigned p = 0; p < passes; ++p) {
    const unsigned shift = 8 * p;
    const unsigned bits = std::min(8u, key_bits - shift);
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    detail::radix_pass(src, bufs[target], bits,
                       [&](const T& v) { return static_cast<std::size_t>((key(v) >> shift) & mask); });
    src = bufs[target];
    target ^= 1;
  }
}

/// Key of a `width`-bit symbol: bits [bit_lo, bit_lo + bit_count) counted
/// from the most significant of its `width` bits.
inline std::uint64_t bit_field_key(std::uint64_t v, unsigned width, unsigned bit_lo, unsigned bit_count) {
  if (bit_count == 0) return 0;
  const unsigned shift = width - bit_lo - bit_count;
  const std::uint64_t mask = bit_count >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bit_count) - 1;
  return (v >> shift) & mask;
}

/// Stable sort of `width`-bit symbols by the key field [bit_lo, bit_lo +
/// bit_count) counted from the most significant bit.
template <class T>
std::vector<T> stable_sort_by_bits(std::span<const T> x, unsigned width, unsigned bit_lo, unsigned bit_count) {
  if (bit_lo + bit_count > width || width > 64) {
    fail(ErrorCode::kInvalidArgument, "sort key exceeds symbol width");
  }
  std::vector<T> out(x.size());
  stable_sort_by_key_into(x, std::span<T>(out), bit_count,
                          [&](const T& v) { return bit_field_key(v, width, bit_lo, bit_count); });
  return out;
}

/// Sorts each segment [bounds[s], bounds[s+1]) of `in` independently and
/// stably by key into the same positions of `out`. `bounds` is ascending
/// and ends with in.size().
template <class T, class Key>
void segmented_stable_sort_into(std::span<const T> in, std::span<T> out,
                                std::span<const std::uint64_t> bounds, unsigned key_bits, Key&& key) {
  if (bounds.size() < 2) return;
  const std::size_t nseg = bounds.size() - 1;
  const std::size_t g = grain();
  auto seg = [&](std::size_t s) {
    const std::size_t lo = bounds[s], hi = bounds[s + 1];
    stable_sort_by_key_into(in.subspan(lo, hi - lo), out.subspan(lo, hi - lo), key_bits, key);
  };
  auto large = pack_index(nseg, [&](std::size_t s) { return bounds[s + 1] - bounds[s] >= g; });
  auto small = pack_index(nseg, [&](std::size_t s) { return bounds[s + 1] - bounds[s] < g; });
  for (auto s : large) seg(s);
  parallel_for(0, small.size(), [&](std::size_t k) { seg(small[k]); },
               in.size() >= g ? 2 : small.size() + 1);
}

}  // namespace pwt::parallel
