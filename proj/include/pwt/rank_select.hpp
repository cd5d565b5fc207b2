#pragma once

// Constant-time rank and select over a Bitmap.
//
// Rank keeps absolute counts every L^2 bits and relative counts every L bits,
// where L = max(8, ceil(log2 n)). Select samples every (L * LL)'th target bit
// (LL = max(2, ceil(log2 L))) and classifies the ranges between samples:
// long ranges store every answer, the rest get a second-level sample whose
// sub-ranges again store answers or are resolved inside a few words.

#include <cstddef>
#include <cstdint>

#include "pwt/bitmap.hpp"

namespace pwt {

/// L(n) = max(8, ceil(log2 n)).
unsigned log_param(std::size_t n);
/// LL(n) = max(2, ceil(log2 L(n))).
unsigned loglog_param(std::size_t n);

/// Position of the j'th (0-based) set bit of x. x must have more than j ones.
unsigned select_in_word(std::uint64_t x, unsigned j);

class RankDirectory {
 public:
  RankDirectory() = default;

  static RankDirectory build(const Bitmap& b);

  /// Ones in [0, i], checked against the bitmap length.
  std::size_t rank1(const Bitmap& b, std::size_t i) const;
  std::size_t rank0(const Bitmap& b, std::size_t i) const { return i + 1 - rank1(b, i); }

  /// Ones in [0, p) for p <= size(). Hardware popcount for the tail block.
  std::size_t ones_before(const Bitmap& b, std::size_t p) const {
    const std::size_t j = p / block_stride_;
    std::size_t r = super_[p / super_stride_] + block_entry(j);
    const std::size_t base = j * block_stride_;
    if (p > base) r += static_cast<std::size_t>(std::popcount(b.read_bits(base, static_cast<unsigned>(p - base))));
    return r;
  }
  std::size_t zeros_before(const Bitmap& b, std::size_t p) const { return p - ones_before(b, p); }

  /// ones_before answered with the popcount lookup table instead of the
  /// popcount instruction.
  std::size_t ones_before_table(const Bitmap& b, std::size_t p) const;

  std::size_t size() const { return nbits_; }
  std::size_t total_ones() const { return ones_; }
  std::size_t super_stride() const { return super_stride_; }
  std::size_t block_stride() const { return block_stride_; }
  std::size_t num_super() const { return super_.size(); }
  std::size_t num_blocks() const { return nbits_ / block_stride_ + 1; }
  std::uint64_t super_entry(std::size_t k) const { return super_[k]; }
  /// Relative count of block j (0 for blocks that start a super block).
  std::uint64_t block_entry(std::size_t j) const {
    const std::size_t per = super_stride_ / block_stride_;
    return j % per == 0 ? 0 : block_[j - j / per - 1];
  }
  unsigned table_bits() const { return table_bits_; }
  std::uint64_t table_entry(std::size_t pattern) const { return table_[pattern]; }

  /// Directory size in bits, excluding the bitmap.
  std::size_t size_in_bits() const;

  friend bool operator==(const RankDirectory&, const RankDirectory&) = default;

  // Raw parts, used by serialization.
  struct Parts {
    std::size_t nbits = 0;
    std::size_t ones = 0;
    BitPackedArray super, block, table;
  };
  Parts parts() const { return {nbits_, ones_, super_, block_, table_}; }
  static RankDirectory from_parts(Parts p);

 private:
  std::size_t nbits_ = 0;
  std::size_t ones_ = 0;
  std::size_t super_stride_ = 64;
  std::size_t block_stride_ = 8;
  unsigned table_bits_ = 0;
  BitPackedArray super_;
  BitPackedArray block_;
  BitPackedArray table_;
};

class SelectDirectory {
 public:
  /// Spans at or below this many bits are resolved by scanning words.
  static constexpr std::size_t kScanBits = 4 * kWordBits;

  SelectDirectory() = default;

  /// Select structure over the bits equal to `target`.
  static SelectDirectory build(const Bitmap& b, bool target);

  /// Position of the k'th (1-based) target bit. Throws kNoSuchOccurrence.
  std::size_t select(const Bitmap& b, std::size_t k) const;

  bool target() const { return target_; }
  std::size_t count() const { return count_; }
  std::size_t size_in_bits() const;

  struct Shape {
    std::size_t explicit_ranges = 0;
    std::size_t scan_ranges = 0;
    std::size_t two_level_ranges = 0;
    std::size_t explicit_subranges = 0;
    std::size_t scan_subranges = 0;
  };
  /// How the ranges were classified (recomputed from the directory).
  Shape shape() const;

  friend bool operator==(const SelectDirectory&, const SelectDirectory&) = default;

  struct Parts {
    std::size_t nbits = 0;
    bool target = true;
    std::size_t count = 0;
    std::size_t last = 0;
    BitPackedArray coarse, offsets;
    Bitmap pool;
  };
  Parts parts() const { return {nbits_, target_, count_, last_, coarse_, offsets_, pool_}; }
  static SelectDirectory from_parts(Parts p);

 private:
  enum class Kind : std::uint8_t { kExplicit, kScan, kTwoLevel };

  void init_params();
  std::size_t range_span(std::size_t k) const;
  Kind classify_range(std::size_t span) const;
  bool subrange_explicit(std::size_t sub_span, std::size_t range_span) const;
  std::size_t sample2(std::size_t range_span) const;
  std::size_t scan_from(const Bitmap& b, std::size_t pos, std::size_t jj) const;

  std::size_t nbits_ = 0;
  bool target_ = true;
  std::size_t count_ = 0;
  std::size_t last_ = 0;  // position of the last target bit
  std::size_t sample_ = 1;
  std::size_t explicit_threshold_ = 0;
  unsigned ll_ = 2;
  BitPackedArray coarse_;   // absolute position of every sample_'th target
  BitPackedArray offsets_;  // bit offset of each range payload in pool_
  Bitmap pool_;
};

/// Bitmap bundled with its rank and both select directories.
struct RankSelectBitmap {
  Bitmap bits;
  RankDirectory rank;
  SelectDirectory select0;
  SelectDirectory select1;

  void build_directories() {
    rank = RankDirectory::build(bits);
    select0 = SelectDirectory::build(bits, false);
    select1 = SelectDirectory::build(bits, true);
  }
  std::size_t directory_bits() const {
    return rank.size_in_bits() + select0.size_in_bits() + select1.size_in_bits();
  }
};

}  // namespace pwt
