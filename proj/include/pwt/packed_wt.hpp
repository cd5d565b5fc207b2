#pragma once

// Construction over packed short lists. Nodes at depths that are multiples of
// tau ("big" nodes) hold full symbols and are produced by a stable integer
// sort per layer; the tau - 1 levels below each big node work on packed
// tau-bit keys, split a block at a time through a precomputed table.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pwt/wavelet_tree.hpp"

namespace pwt {

/// N integers of b bits each, packed LSB-first into 64-bit words. Bits past
/// the last element are zero.
class PackedList {
 public:
  static constexpr unsigned kMaxWidth = 32;

  PackedList() = default;
  explicit PackedList(unsigned b);
  /// Zero-filled list of `count` elements.
  static PackedList zeros(unsigned b, std::size_t count);
  static PackedList from_values(unsigned b, std::span<const std::uint64_t> values);

  unsigned width() const { return width_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::uint64_t get(std::size_t i) const { return read_bits(i * width_, width_); }
  std::vector<std::uint64_t> values() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

  void push_back(std::uint64_t v);
  /// Appends c; throws kInvalidArgument on a width mismatch.
  void append(const PackedList& c);
  /// Chunks of k elements, the last possibly shorter. k >= 1.
  std::vector<PackedList> split(std::size_t k) const;

  /// Up to 64 bits starting at bit `pos` of the word stream.
  std::uint64_t read_bits(std::size_t pos, unsigned bits) const;
  /// ORs `bits` bits into position `pos` with atomic word updates. Returns
  /// the number of words touched.
  unsigned or_bits_atomic(std::size_t pos, std::uint64_t value, unsigned bits);

  friend bool operator==(const PackedList&, const PackedList&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t count_ = 0;
  unsigned width_ = 1;
};

PackedList packed_append(PackedList a, const PackedList& c);

/// Result of splitting one block of packed tau-bit elements by bit t (counted
/// from the most significant of the tau bits). `parts` holds the zero-bit
/// elements followed by the one-bit elements, both in block order.
struct SplitEntry {
  std::uint32_t bitmap = 0;  // bit i = chosen bit of element i
  std::uint32_t parts = 0;
};

class SplitTable {
 public:
  static constexpr std::size_t kMaxEntries = std::size_t{1} << 24;
  static constexpr unsigned kMaxBlockBits = 32;

  SplitTable() = default;

  /// max(1, floor(sqrt(lg n))) with lg n = floor(log2 n) (at least 1).
  static unsigned tau_for(std::uint64_t n);
  /// max(1, floor(lg n / (2 tau))), lowered until tau * block <= 32 and the
  /// table has at most kMaxEntries entries.
  static unsigned block_for(unsigned tau, std::uint64_t n);
  static std::size_t entries_for(unsigned tau, unsigned block);

  /// All blocks of 1..block elements of tau bits, for every t < tau.
  /// Throws kInvalidArgument if tau or block is 0, tau * block > 32 or the
  /// table would exceed kMaxEntries.
  static SplitTable build(unsigned tau, unsigned block);

  const SplitEntry& lookup(unsigned m, std::uint64_t pattern, unsigned t) const {
    return entries_[offset_[m] + pattern * tau_ + t];
  }
  unsigned tau() const { return tau_; }
  unsigned block() const { return block_; }
  std::size_t size() const { return entries_.size(); }

 private:
  unsigned tau_ = 1;
  unsigned block_ = 1;
  std::vector<std::size_t> offset_;  // per block length
  std::vector<SplitEntry> entries_;
};

struct PackedOptions {
  unsigned tau = 0;    // 0: tau_for(n)
  unsigned block = 0;  // 0: block_for(tau, n)
};

struct PackedStats {
  unsigned tau = 0;
  unsigned block = 0;
  std::vector<unsigned> big_levels;
  std::uint64_t big_node_ops = 0;           // sorts, key extraction, big-node bitmap writes
  std::uint64_t short_list_ops = 0;         // block reads, lookups, scans and copies
  std::uint64_t short_list_symbol_levels = 0;  // symbols handled by short-list levels, summed
};

/// Per-node bitmaps; per_level[l] lists (heap id, bitmap) sorted by id.
struct PackedTree {
  std::uint64_t n = 0;
  std::uint64_t sigma = 1;
  std::vector<std::vector<std::pair<std::uint64_t, Bitmap>>> per_level;
};

PackedTree build_packed(std::span<const Symbol> s, std::uint64_t sigma, const PackedOptions& opt = {},
                        PackedStats* stats = nullptr);

/// Lays per-node bitmaps out as level bitmaps plus node table.
WaveletTree to_wavelet_tree(const PackedTree& t, bool directories = true);

inline WaveletTree build_packed_wt(std::span<const Symbol> s, std::uint64_t sigma, bool directories = true,
                                   const PackedOptions& opt = {}, PackedStats* stats = nullptr) {
  return to_wavelet_tree(build_packed(s, sigma, opt, stats), directories);
}

}  // namespace pwt
