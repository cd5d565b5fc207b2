#pragma once

// Rank and select over sequences on a small alphabet (sigma <= 256).
//
// Rank is cumulative: grank(c, i) counts symbols <= c in [0, i]. Cumulative
// count vectors are sampled every super_len symbols (absolute) and every
// block_len symbols (relative to the super sample); the tail inside a block
// comes from a lookup table when it is small enough, otherwise a scan.
//
// Select keeps one structure per character: every g1'th occurrence, then per
// range either every answer or a second sample every g2 occurrences whose
// sub-ranges again store answers or are searched with rank.

#include <cstdint>
#include <span>
#include <vector>

#include "pwt/bitmap.hpp"

namespace pwt {

/// Bits per symbol of a sigma-ary sequence: max(1, ceil(log2 sigma)).
unsigned symbol_width(std::uint64_t sigma);

/// Packs symbols with symbol_width(sigma) bits each.
BitPackedArray pack_symbols(std::span<const std::uint32_t> s, std::uint64_t sigma);

struct GeneralStats {
  std::uint64_t ops = 0;  // symbol reads, table lookups and count-vector updates
};

class GeneralRS {
 public:
  static constexpr unsigned kMaxSigma = 256;
  static constexpr unsigned kMaxTableKeyBits = 20;

  GeneralRS() = default;

  /// s must be packed with symbol_width(sigma) bits.
  static GeneralRS build(const BitPackedArray& s, unsigned sigma, GeneralStats* stats = nullptr);

  /// Symbols <= c in [0, i].
  std::uint64_t grank(const BitPackedArray& s, unsigned c, std::uint64_t i) const;
  /// Occurrences of exactly c in [0, i].
  std::uint64_t rank(const BitPackedArray& s, unsigned c, std::uint64_t i) const {
    return grank(s, c, i) - (c ? grank(s, c - 1, i) : 0);
  }
  /// Position of the k'th (1-based) occurrence of c.
  std::uint64_t gselect(const BitPackedArray& s, unsigned c, std::uint64_t k) const;

  unsigned sigma() const { return sigma_; }
  std::uint64_t size() const { return n_; }
  std::uint64_t frequency(unsigned c) const { return freq_[c]; }
  std::uint64_t block_len() const { return block_len_; }
  std::uint64_t super_len() const { return super_len_; }
  bool uses_table() const { return !table_.empty(); }
  /// Cumulative (<= c) count at the sample points, absolute.
  std::uint64_t super_entry(std::size_t k, unsigned c) const { return super_[k * sigma_ + c]; }
  std::uint64_t block_entry(std::size_t j, unsigned c) const { return block_[j * sigma_ + c]; }
  std::size_t num_super() const { return super_.size() / sigma_; }
  std::size_t num_blocks() const { return block_.size() / sigma_; }

  struct SelectShape {
    std::size_t explicit_ranges = 0;
    std::size_t two_level_ranges = 0;
    std::size_t explicit_subranges = 0;
    std::size_t searched_subranges = 0;
  };
  SelectShape select_shape() const;

  std::size_t size_in_bits() const;

  friend bool operator==(const GeneralRS&, const GeneralRS&) = default;

  // Raw parts for serialization. Derived parameters are recomputed.
  struct Parts {
    std::uint64_t n = 0;
    unsigned sigma = 1;
    std::vector<std::uint64_t> super;
    std::vector<std::uint32_t> block;
    std::vector<std::uint64_t> freq, last, coarse_begin, coarse, payload;
    std::vector<std::uint32_t> pool;
  };
  Parts parts() const;
  static GeneralRS from_parts(Parts p);

 private:
  static constexpr std::uint32_t kNoPayload = 0xffffffffu;

  void init_params();
  void build_table();
  std::uint64_t in_block(const BitPackedArray& s, std::uint64_t pos, std::uint64_t j, unsigned c) const;
  std::uint64_t range_span(unsigned c, std::uint64_t r) const;
  bool range_explicit(std::uint64_t span) const { return span >= explicit_range_; }
  bool sub_explicit(std::uint64_t span) const { return span >= explicit_sub_; }

  std::uint64_t n_ = 0;
  unsigned sigma_ = 1;
  unsigned width_ = 1;
  std::uint64_t block_len_ = 1;
  std::uint64_t super_len_ = 1;
  std::uint64_t g1_ = 1, g2_ = 1;
  std::uint64_t explicit_range_ = 0, explicit_sub_ = 0;

  std::vector<std::uint64_t> super_;  // (n / super_len + 1) x sigma
  std::vector<std::uint32_t> block_;  // (n / block_len + 1) x sigma
  std::vector<std::uint8_t> table_;   // [pattern][j][c] -> symbols <= c among the first j

  std::vector<std::uint64_t> freq_;          // occurrences per character
  std::vector<std::uint64_t> last_;          // position of the last occurrence
  std::vector<std::uint64_t> coarse_begin_;  // sigma + 1 offsets into coarse_
  std::vector<std::uint64_t> coarse_;        // every g1'th occurrence, grouped by character
  std::vector<std::uint64_t> payload_;       // per range: index into pool_
  std::vector<std::uint32_t> pool_;
};

}  // namespace pwt
