#pragma once

// Binary wavelet tree over the padded alphabet [0, 2^L), L = ceil(log2 sigma).
// Level l holds one n-bit bitmap; node ids are heap ids (children 2id+1 and
// 2id+2) and every node is a (start, len) slice of its level's bitmap.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pwt/rank_select.hpp"

namespace pwt {

using Symbol = std::uint32_t;

struct IndexCodec;  // serialization, see index_file.cpp

/// Levels of a binary code for sigma symbols: ceil(log2 sigma).
unsigned levels_for_sigma(std::uint64_t sigma);

/// Throws kInvalidArgument for sigma outside [1, 2^32] and
/// kSymbolOutOfRange for any s[i] >= sigma.
void validate_sequence(std::span<const Symbol> s, std::uint64_t sigma);

struct NodeEntry {
  std::uint64_t start = 0;
  std::uint64_t len = 0;
  friend bool operator==(const NodeEntry&, const NodeEntry&) = default;
};

/// Level of heap id `id`: floor(log2(id + 1)).
inline unsigned node_level(std::uint64_t id) { return bit_width_of(id + 1) - 1; }

/// Heap-id keyed node table. Ids are kept sorted; a dense id index is added
/// when the tree has at most kDenseMaxLevels levels.
class NodeTable {
 public:
  static constexpr unsigned kDenseMaxLevels = 20;

  NodeTable() = default;

  /// Per-level lists of (id, entry), each sorted by id.
  static NodeTable from_levels(unsigned levels, std::vector<std::vector<std::pair<std::uint64_t, NodeEntry>>> per_level);

  const NodeEntry* find(std::uint64_t id) const;
  std::size_t size() const { return ids_.size(); }
  std::uint64_t id_at(std::size_t k) const { return ids_[k]; }
  const NodeEntry& entry_at(std::size_t k) const { return entries_[k]; }
  bool dense() const { return !dense_.empty(); }
  unsigned levels() const { return levels_; }

  friend bool operator==(const NodeTable& a, const NodeTable& b) {
    return a.levels_ == b.levels_ && a.ids_ == b.ids_ && a.entries_ == b.entries_;
  }

 private:
  unsigned levels_ = 0;
  std::vector<std::uint64_t> ids_;
  std::vector<NodeEntry> entries_;
  std::vector<std::uint32_t> dense_;  // id -> index + 1, 0 if absent
};

/// Word-level operation counts of the construction (levelWT only fills the
/// partition fields).
struct BuildStats {
  std::uint64_t partition_ops = 0;       // array reads and writes while partitioning
  std::uint64_t partitioned_symbols = 0;  // sum over levels of symbols partitioned
};

class WaveletTree {
 public:
  WaveletTree() = default;

  /// Level-by-level construction: each level stably partitions every node
  /// by its bit using a prefix sum.
  static WaveletTree build_level(std::span<const Symbol> s, std::uint64_t sigma, bool directories = true,
                                 BuildStats* stats = nullptr);
  /// Every level independently: stable sort by the top l bits.
  static WaveletTree build_sort(std::span<const Symbol> s, std::uint64_t sigma, bool directories = true);
  /// Level l sorts the level l-1 order by a single bit within each node.
  static WaveletTree build_msort(std::span<const Symbol> s, std::uint64_t sigma, bool directories = true);

  /// Assembles a tree from finished level bitmaps and node table.
  static WaveletTree from_parts(std::uint64_t n, std::uint64_t sigma, std::vector<Bitmap> levels, NodeTable nodes,
                                bool directories = true);

  void build_directories();
  bool has_directories() const { return has_dirs_; }

  std::uint64_t size() const { return n_; }
  std::uint64_t sigma() const { return sigma_; }
  unsigned num_levels() const { return static_cast<unsigned>(levels_.size()); }
  const RankSelectBitmap& level(unsigned l) const { return levels_[l]; }
  const Bitmap& level_bits(unsigned l) const { return levels_[l].bits; }
  Bitmap& mutable_level_bits(unsigned l) { return levels_[l].bits; }
  const NodeTable& nodes() const { return nodes_; }

  Symbol access(std::uint64_t i) const;
  /// Occurrences of c in [0, i].
  std::uint64_t rank(std::uint64_t c, std::uint64_t i) const;
  /// Position of the k'th (1-based) occurrence of c.
  std::uint64_t select(std::uint64_t c, std::uint64_t k) const;

  std::size_t bitmap_bits() const { return static_cast<std::size_t>(n_) * levels_.size(); }
  std::size_t directory_bits() const;

  /// Same level bitmaps and node table (directories ignored).
  bool same_structure(const WaveletTree& o) const;

 private:
  friend struct IndexCodec;
  void require_dirs() const;

  std::uint64_t n_ = 0;
  std::uint64_t sigma_ = 1;
  std::vector<RankSelectBitmap> levels_;
  NodeTable nodes_;
  bool has_dirs_ = false;
};

}  // namespace pwt
