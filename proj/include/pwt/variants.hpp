#pragma once

// Huffman-shaped wavelet tree, wavelet matrix and multiary wavelet tree.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pwt/general_rank_select.hpp"
#include "pwt/wavelet_tree.hpp"

namespace pwt {

// ---------------------------------------------------------------------------
// Huffman codes

/// Child reference inside a code tree: an internal node index or a leaf.
struct CodeChild {
  bool leaf = false;
  std::uint64_t index = 0;  // internal node index, or leaf number for leaves
  friend bool operator==(const CodeChild&, const CodeChild&) = default;
};

/// Binary code tree over the symbols with nonzero frequency. Internal node
/// 0 is the root. Leaves are numbered in in-order, so leaf k is the k'th
/// leaf met by an in-order walk.
struct CodeTree {
  static constexpr std::uint64_t kNone = ~std::uint64_t{0};  // missing right child of a 1-leaf tree

  std::vector<std::uint64_t> leaf_symbol;  // leaf number -> symbol
  std::vector<CodeChild> left, right;      // per internal node
  std::vector<std::uint64_t> split_key;    // highest leaf number in the left subtree
  std::vector<std::uint64_t> parent;       // per internal node (root: itself)
  std::vector<std::uint64_t> leaf_parent;  // per leaf
  std::vector<std::uint8_t> leaf_side;     // 0 left child, 1 right child
  std::vector<std::uint32_t> leaf_depth;   // code length per leaf

  std::size_t num_internal() const { return left.size(); }
  friend bool operator==(const CodeTree&, const CodeTree&) = default;
};

/// Huffman tree for (symbol, frequency) pairs with nonzero frequencies,
/// symbols ascending. Ties are broken by (weight, smallest symbol); when two
/// subtrees merge the one holding the smaller symbol goes left. A single
/// symbol gets a 1-bit code. Throws kInvalidArgument when empty.
CodeTree build_huffman_codes(std::span<const std::pair<std::uint64_t, std::uint64_t>> freqs);

class HuffmanWT {
 public:
  HuffmanWT() = default;

  static HuffmanWT build(std::span<const Symbol> s, std::uint64_t sigma, bool directories = true);
  /// Rebuilds the tree from stored frequencies and node bitmaps.
  static HuffmanWT from_parts(std::uint64_t n, std::uint64_t sigma,
                              std::vector<std::pair<std::uint64_t, std::uint64_t>> freqs, std::vector<Bitmap> bitmaps,
                              bool directories = true);
  void build_directories();
  bool has_directories() const { return has_dirs_; }

  Symbol access(std::uint64_t i) const;
  std::uint64_t rank(std::uint64_t c, std::uint64_t i) const;
  std::uint64_t select(std::uint64_t c, std::uint64_t k) const;

  std::uint64_t size() const { return n_; }
  std::uint64_t sigma() const { return sigma_; }
  const CodeTree& code() const { return tree_; }
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& frequencies() const { return freqs_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  const Bitmap& node_bits(std::size_t k) const { return nodes_[k].bits; }
  /// Code length of symbol c (0 when c does not occur).
  unsigned code_length(std::uint64_t c) const;
  std::size_t bitmap_bits() const;
  std::size_t directory_bits() const;

 private:
  friend struct IndexCodec;
  // Index of c in freqs_, or -1 when absent.
  std::int64_t find_symbol(std::uint64_t c) const;
  std::vector<std::pair<std::uint64_t, unsigned>> path_to(std::uint64_t leaf) const;

  std::uint64_t n_ = 0;
  std::uint64_t sigma_ = 1;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> freqs_;
  CodeTree tree_;
  std::vector<std::uint64_t> leaf_of_;  // aligned with freqs_
  std::vector<RankSelectBitmap> nodes_;
  bool has_dirs_ = false;
};

// ---------------------------------------------------------------------------
// Wavelet matrix

class WaveletMatrix {
 public:
  WaveletMatrix() = default;

  /// Level by level: stable zeros-first partition by the next bit.
  static WaveletMatrix build(std::span<const Symbol> s, std::uint64_t sigma, bool directories = true);
  /// Level l sorted independently by the reversed top l bits.
  static WaveletMatrix build_by_sort(std::span<const Symbol> s, std::uint64_t sigma, bool directories = true);
  static WaveletMatrix from_parts(std::uint64_t n, std::uint64_t sigma, std::vector<Bitmap> levels,
                                  bool directories = true);
  void build_directories();
  bool has_directories() const { return has_dirs_; }

  Symbol access(std::uint64_t i) const;
  std::uint64_t rank(std::uint64_t c, std::uint64_t i) const;
  std::uint64_t select(std::uint64_t c, std::uint64_t k) const;

  std::uint64_t size() const { return n_; }
  std::uint64_t sigma() const { return sigma_; }
  unsigned num_levels() const { return static_cast<unsigned>(levels_.size()); }
  const Bitmap& level_bits(unsigned l) const { return levels_[l].bits; }
  std::uint64_t zeros(unsigned l) const { return z_[l]; }
  std::size_t directory_bits() const;

  friend bool operator==(const WaveletMatrix& a, const WaveletMatrix& b);

 private:
  friend struct IndexCodec;
  std::uint64_t n_ = 0;
  std::uint64_t sigma_ = 1;
  std::vector<RankSelectBitmap> levels_;
  std::vector<std::uint64_t> z_;
  bool has_dirs_ = false;
};

// ---------------------------------------------------------------------------
// Multiary wavelet tree

class MultiaryWT {
 public:
  static constexpr unsigned kMaxArity = 256;

  MultiaryWT() = default;

  /// d must be a power of two in [2, 256].
  static MultiaryWT build(std::span<const Symbol> s, std::uint64_t sigma, unsigned d, bool directories = true);
  static MultiaryWT from_parts(std::uint64_t n, std::uint64_t sigma, unsigned d, std::vector<BitPackedArray> digits,
                               bool directories = true);
  void build_directories();
  bool has_directories() const { return has_dirs_; }

  Symbol access(std::uint64_t i) const;
  std::uint64_t rank(std::uint64_t c, std::uint64_t i) const;
  std::uint64_t select(std::uint64_t c, std::uint64_t k) const;

  std::uint64_t size() const { return n_; }
  std::uint64_t sigma() const { return sigma_; }
  unsigned arity() const { return d_; }
  unsigned num_levels() const { return static_cast<unsigned>(digits_.size()); }
  const BitPackedArray& digits(unsigned l) const { return digits_[l]; }
  const GeneralRS& level_rs(unsigned l) const { return rs_[l]; }
  /// Nodes of level l as (id, entry), ids offset by d^l - 1.
  const std::vector<std::pair<std::uint64_t, NodeEntry>>& level_nodes(unsigned l) const { return nodes_[l]; }
  std::size_t directory_bits() const;

 private:
  friend struct IndexCodec;
  unsigned digit_of(std::uint64_t c, unsigned l) const;
  // Symbols <= c in [a, b) of level l (c may be -1).
  std::uint64_t count_le(unsigned l, std::int64_t c, std::uint64_t a, std::uint64_t b) const;

  std::uint64_t n_ = 0;
  std::uint64_t sigma_ = 1;
  unsigned d_ = 2;
  unsigned log_d_ = 1;
  std::vector<BitPackedArray> digits_;
  std::vector<GeneralRS> rs_;
  std::vector<std::vector<std::pair<std::uint64_t, NodeEntry>>> nodes_;
  bool has_dirs_ = false;
};

}  // namespace pwt
