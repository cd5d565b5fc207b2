#pragma once

#include <atomic>
#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pwt/error.hpp"
#include "pwt/parallel.hpp"

namespace pwt {

inline constexpr unsigned kWordBits = 64;

inline constexpr std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

/// Number of bits needed to represent v (0 for v == 0).
inline constexpr unsigned bit_width_of(std::uint64_t v) { return static_cast<unsigned>(std::bit_width(v)); }

/// Counters filled by the instrumented region writers.
struct WriteStats {
  std::uint64_t word_stores = 0;   // plain stores of whole words
  std::uint64_t atomic_words = 0;  // boundary words merged with a CAS loop
  std::uint64_t set_ops = 0;       // OR operations used to assemble word values
};

/// Word-packed bit array, LSB-first inside each 64-bit word. Bits past
/// size() in the last word are always zero.
class Bitmap {
 public:
  Bitmap() = default;
  explicit Bitmap(std::size_t nbits) : words_((nbits + kWordBits - 1) / kWordBits, 0), nbits_(nbits) {}

  std::size_t size() const { return nbits_; }
  std::size_t num_words() const { return words_.size(); }
  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> mutable_words() { return words_; }

  bool get(std::size_t i) const {
    assert(i < nbits_);
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
  }

  /// Bounds-checked get.
  bool at(std::size_t i) const {
    if (i >= nbits_) fail(ErrorCode::kOutOfRange, "bit index out of range");
    return get(i);
  }

  /// Sequential single-bit write. Not safe against concurrent writers of the
  /// same word.
  void set(std::size_t i, bool bit) {
    assert(i < nbits_);
    const std::uint64_t m = std::uint64_t{1} << (i % kWordBits);
    if (bit) words_[i / kWordBits] |= m;
    else words_[i / kWordBits] &= ~m;
  }

  /// Writes bits [start, start + bits.size()) from a 0/1 sequence. Safe for
  /// concurrent callers with disjoint ranges.
  void write_region(std::size_t start, std::span<const std::uint8_t> bits, WriteStats* stats = nullptr) {
    check_region(start, bits.size());
    write_region_with(start, bits.size(), [&](std::size_t k) { return bits[k] != 0; }, stats);
  }

  /// Same contract as write_region; assembles runs of consecutive 1 bits
  /// with one mask operation each.
  void write_region_run_optimized(std::size_t start, std::span<const std::uint8_t> bits,
                                  WriteStats* stats = nullptr) {
    check_region(start, bits.size());
    write_region_runs_with(start, bits.size(), [&](std::size_t k) { return bits[k] != 0; }, stats);
  }

  /// Region writer over a bit generator: bit k of the region is bit_at(k).
  /// Whole words inside the region get plain stores; the (at most two)
  /// partial words at its ends are merged atomically.
  template <class BitAt>
  void write_region_with(std::size_t start, std::size_t len, BitAt&& bit_at, WriteStats* stats = nullptr) {
    for_region_words(start, len, stats, [&](std::size_t lo, std::size_t hi, std::uint64_t& ops) {
      std::uint64_t v = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        if (bit_at(i - start)) {
          v |= std::uint64_t{1} << (i % kWordBits);
          ++ops;
        }
      }
      return v;
    });
  }

  template <class BitAt>
  void write_region_runs_with(std::size_t start, std::size_t len, BitAt&& bit_at, WriteStats* stats = nullptr) {
    for_region_words(start, len, stats, [&](std::size_t lo, std::size_t hi, std::uint64_t& ops) {
      std::uint64_t v = 0;
      std::size_t i = lo;
      while (i < hi) {
        if (!bit_at(i - start)) {
          ++i;
          continue;
        }
        std::size_t e = i + 1;
        while (e < hi && bit_at(e - start)) ++e;
        v |= low_mask(static_cast<unsigned>(e - i)) << (i % kWordBits);
        ++ops;
        i = e;
      }
      return v;
    });
  }

  /// Atomically ORs `width` bits of `value` at bit position pos. For
  /// disjoint concurrent writers into zero-initialized storage.
  void or_bits_atomic(std::size_t pos, std::uint64_t value, unsigned width) {
    if (width == 0) return;
    value &= low_mask(width);
    const std::size_t w = pos / kWordBits;
    const unsigned off = pos % kWordBits;
    std::atomic_ref<std::uint64_t>(words_[w]).fetch_or(value << off, std::memory_order_relaxed);
    if (off + width > kWordBits) {
      std::atomic_ref<std::uint64_t>(words_[w + 1]).fetch_or(value >> (kWordBits - off),
                                                             std::memory_order_relaxed);
    }
  }

  /// Reads `width` <= 64 bits starting at pos (may cross a word boundary).
  std::uint64_t read_bits(std::size_t pos, unsigned width) const {
    if (width == 0) return 0;
    const std::size_t w = pos / kWordBits;
    const unsigned off = pos % kWordBits;
    std::uint64_t v = words_[w] >> off;
    if (off + width > kWordBits) v |= words_[w + 1] << (kWordBits - off);
    return v & low_mask(width);
  }

  std::size_t count_ones() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  friend bool operator==(const Bitmap& a, const Bitmap& b) { return a.nbits_ == b.nbits_ && a.words_ == b.words_; }

 private:
  void check_region(std::size_t start, std::size_t len) const {
    if (start > nbits_ || len > nbits_ - start) fail(ErrorCode::kOutOfRange, "bitmap region out of range");
  }

  // Visits every word overlapping [start, start+len). assemble(lo, hi, ops)
  // returns the word's new bits for positions [lo, hi).
  template <class Assemble>
  void for_region_words(std::size_t start, std::size_t len, WriteStats* stats, Assemble&& assemble) {
    if (len == 0) return;
    const std::size_t end = start + len;
    const std::size_t first = start / kWordBits;
    const std::size_t last = (end - 1) / kWordBits;
    std::atomic<std::uint64_t> stores{0}, atomics{0}, ops{0};
    auto word = [&](std::size_t w) {
      const std::size_t wlo = w * kWordBits;
      const std::size_t lo = std::max(start, wlo);
      const std::size_t hi = std::min(end, wlo + kWordBits);
      std::uint64_t local_ops = 0;
      const std::uint64_t v = assemble(lo, hi, local_ops);
      if (lo == wlo && hi == wlo + kWordBits) {
        words_[w] = v;
        if (stats) stores.fetch_add(1, std::memory_order_relaxed);
      } else {
        const std::uint64_t mask = low_mask(static_cast<unsigned>(hi - lo)) << (lo - wlo);
        std::atomic_ref<std::uint64_t> ref(words_[w]);
        std::uint64_t old = ref.load(std::memory_order_relaxed);
        while (!ref.compare_exchange_weak(old, (old & ~mask) | v, std::memory_order_relaxed)) {
        }
        if (stats) atomics.fetch_add(1, std::memory_order_relaxed);
      }
      if (stats) ops.fetch_add(local_ops, std::memory_order_relaxed);
    };
    parallel::parallel_for(first, last + 1, word, parallel::grain() / kWordBits + 1);
    if (stats) {
      stats->word_stores += stores.load();
      stats->atomic_words += atomics.load();
      stats->set_ops += ops.load();
    }
  }

  std::vector<std::uint64_t> words_;
  std::size_t nbits_ = 0;
};

/// Fixed-width packed unsigned integers (width 0..64), LSB-first.
class BitPackedArray {
 public:
  BitPackedArray() = default;
  BitPackedArray(std::size_t count, unsigned width)
      : bits_(count * width), count_(count), width_(width) {
    if (width > 64) fail(ErrorCode::kInvalidArgument, "packed width above 64");
  }

  /// Packs values with the minimum width that holds their maximum.
  static BitPackedArray from_values(std::span<const std::uint64_t> values) {
    std::uint64_t mx = 0;
    for (auto v : values) mx = std::max(mx, v);
    BitPackedArray a(values.size(), bit_width_of(mx));
    parallel::parallel_for(0, values.size(), [&](std::size_t i) { a.set_atomic(i, values[i]); });
    return a;
  }

  std::size_t size() const { return count_; }
  unsigned width() const { return width_; }
  const Bitmap& bits() const { return bits_; }

  std::uint64_t get(std::size_t i) const {
    assert(i < count_);
    return bits_.read_bits(i * width_, width_);
  }
  std::uint64_t operator[](std::size_t i) const { return get(i); }

  /// Writes into zero-initialized storage; safe for concurrent distinct i.
  void set_atomic(std::size_t i, std::uint64_t v) {
    assert(i < count_);
    bits_.or_bits_atomic(i * width_, v, width_);
  }

  /// Storage size in bits (payload words).
  std::size_t size_in_bits() const { return bits_.num_words() * kWordBits; }

  static BitPackedArray from_raw(Bitmap bits, std::size_t count, unsigned width) {
    BitPackedArray a;
    a.bits_ = std::move(bits);
    a.count_ = count;
    a.width_ = width;
    return a;
  }

  friend bool operator==(const BitPackedArray& a, const BitPackedArray& b) {
    return a.count_ == b.count_ && a.width_ == b.width_ && a.bits_ == b.bits_;
  }

 private:
  Bitmap bits_;
  std::size_t count_ = 0;
  unsigned width_ = 0;
};

}  // namespace pwt
