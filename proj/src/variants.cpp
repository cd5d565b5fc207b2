#include "pwt/variants.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <tuple>

#include "pwt/parallel.hpp"

namespace pwt {

// ---------------------------------------------------------------------------
// Huffman codes

CodeTree build_huffman_codes(std::span<const std::pair<std::uint64_t, std::uint64_t>> freqs) {
  const std::size_t m = freqs.size();
  if (m == 0) fail(ErrorCode::kInvalidArgument, "huffman code needs at least one symbol");
  for (std::size_t k = 0; k < m; ++k) {
    if (freqs[k].second == 0) fail(ErrorCode::kInvalidArgument, "zero frequency");
    if (k && freqs[k].first <= freqs[k - 1].first) fail(ErrorCode::kInvalidArgument, "symbols not ascending");
  }
  CodeTree t;
  if (m == 1) {
    t.leaf_symbol = {freqs[0].first};
    t.left = {CodeChild{true, 0}};
    t.right = {CodeChild{false, CodeTree::kNone}};
    t.split_key = {0};
    t.parent = {0};
    t.leaf_parent = {0};
    t.leaf_side = {0};
    t.leaf_depth = {1};
    return t;
  }

  // Merge phase. Temporary ids: [0, m) leaves (index into freqs), m.. merges.
  struct Merge {
    std::uint64_t left, right;
  };
  std::vector<Merge> merges;
  using Item = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>;  // weight, min symbol, temp id
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  for (std::size_t k = 0; k < m; ++k) q.emplace(freqs[k].second, freqs[k].first, k);
  while (q.size() > 1) {
    auto [wa, sa, ia] = q.top();
    q.pop();
    auto [wb, sb, ib] = q.top();
    q.pop();
    if (sb < sa) {
      std::swap(sa, sb);
      std::swap(ia, ib);
    }
    merges.push_back({ia, ib});
    q.emplace(wa + wb, sa, m + merges.size() - 1);
  }

  // Preorder numbering of internal nodes, in-order numbering of leaves.
  const std::size_t internal = merges.size();
  t.left.resize(internal);
  t.right.resize(internal);
  t.split_key.resize(internal);
  t.parent.resize(internal);
  t.leaf_symbol.reserve(m);
  t.leaf_parent.resize(m);
  t.leaf_side.resize(m);
  t.leaf_depth.resize(m);
  std::uint64_t next_internal = 0;
  struct Frame {
    std::uint64_t temp, node, parent, depth;
    unsigned side;
    int stage;
  };
  // Explicit stack; stage 0 = enter, 1 = after left subtree.
  std::vector<Frame> stack{{std::get<2>(q.top()), 0, 0, 0, 0, 0}};
  std::vector<CodeChild> resolved;  // child reference of the frame just finished
  auto is_leaf = [&](std::uint64_t temp) { return temp < m; };
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (is_leaf(f.temp)) {
      const std::uint64_t leaf = t.leaf_symbol.size();
      t.leaf_symbol.push_back(freqs[f.temp].first);
      t.leaf_parent[leaf] = f.parent;
      t.leaf_side[leaf] = static_cast<std::uint8_t>(f.side);
      t.leaf_depth[leaf] = static_cast<std::uint32_t>(f.depth);
      resolved.push_back({true, leaf});
      stack.pop_back();
      continue;
    }
    const Merge& mg = merges[f.temp - m];
    if (f.stage == 0) {
      f.node = next_internal++;
      t.parent[f.node] = f.parent;
      f.stage = 1;
      const Frame child{mg.left, 0, f.node, f.depth + 1, 0, 0};
      stack.push_back(child);
    } else if (f.stage == 1) {
      t.left[f.node] = resolved.back();
      resolved.pop_back();
      t.split_key[f.node] = t.leaf_symbol.size() - 1;
      f.stage = 2;
      const Frame child{mg.right, 0, f.node, f.depth + 1, 1, 0};
      stack.push_back(child);
    } else {
      t.right[f.node] = resolved.back();
      resolved.pop_back();
      const CodeChild me{false, f.node};
      stack.pop_back();
      resolved.push_back(me);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Huffman-shaped wavelet tree

namespace {

std::vector<std::pair<std::uint64_t, std::uint64_t>> symbol_frequencies(std::span<const Symbol> s, unsigned L) {
  if (s.empty()) return {};
  auto sorted = parallel::stable_sort_by_bits(s, std::max(L, 1u), 0, L);
  auto bounds = parallel::pack_index(sorted.size(), [&](std::size_t i) { return i == 0 || sorted[i] != sorted[i - 1]; });
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out(bounds.size());
  parallel::parallel_for(0, bounds.size(), [&](std::size_t k) {
    const std::uint64_t hi = k + 1 < bounds.size() ? bounds[k + 1] : sorted.size();
    out[k] = {sorted[bounds[k]], hi - bounds[k]};
  });
  return out;
}

// Subtree weight of every internal node.
std::vector<std::uint64_t> internal_weights(const CodeTree& t,
                                            const std::vector<std::pair<std::uint64_t, std::uint64_t>>& freqs,
                                            const std::vector<std::uint64_t>& leaf_weight) {
  std::vector<std::uint64_t> w(t.num_internal(), 0);
  (void)freqs;
  // Preorder numbering: children have larger numbers than parents.
  for (std::size_t k = t.num_internal(); k-- > 0;) {
    for (const CodeChild* ch : {&t.left[k], &t.right[k]}) {
      if (ch->leaf) w[k] += leaf_weight[ch->index];
      else if (ch->index != CodeTree::kNone) w[k] += w[ch->index];
    }
  }
  return w;
}

}  // namespace

HuffmanWT HuffmanWT::build(std::span<const Symbol> s, std::uint64_t sigma, bool directories) {
  validate_sequence(s, sigma);
  HuffmanWT h;
  h.n_ = s.size();
  h.sigma_ = sigma;
  const std::size_t n = s.size();
  if (n == 0) {
    h.has_dirs_ = directories;
    return h;
  }
  h.freqs_ = symbol_frequencies(s, levels_for_sigma(sigma));
  h.tree_ = build_huffman_codes(h.freqs_);
  const CodeTree& t = h.tree_;
  h.leaf_of_.assign(h.freqs_.size(), 0);
  for (std::size_t leaf = 0; leaf < t.leaf_symbol.size(); ++leaf) {
    h.leaf_of_[static_cast<std::size_t>(h.find_symbol(t.leaf_symbol[leaf]))] = leaf;
  }

  // Map every symbol to its in-order leaf number.
  std::vector<std::uint32_t> M(n), M2(n);
  parallel::parallel_for(0, n, [&](std::size_t i) {
    M[i] = static_cast<std::uint32_t>(h.leaf_of_[static_cast<std::size_t>(h.find_symbol(s[i]))]);
  });

  h.nodes_.resize(t.num_internal());
  std::vector<std::uint64_t> X(n);
  struct Frontier {
    std::uint64_t start, len, node;
  };
  std::vector<Frontier> A{{0, n, 0}};
  const std::size_t g = parallel::grain();
  while (!A.empty()) {
    std::vector<Frontier> A2(2 * A.size(), Frontier{0, 0, 0});
    auto node = [&](std::size_t j) {
      const auto [start, len, id] = A[j];
      const std::uint64_t key = t.split_key[id];
      Bitmap B(len);
      B.write_region_with(0, len, [&](std::size_t i) { return M[start + i] > key; });
      h.nodes_[id].bits = std::move(B);
      const CodeChild l = t.left[id], r = t.right[id];
      const bool l_internal = !l.leaf && l.index != CodeTree::kNone;
      const bool r_internal = !r.leaf && r.index != CodeTree::kNone;
      if (!l_internal && !r_internal) return;
      std::span<std::uint64_t> x(X.data() + start, len);
      parallel::parallel_for(0, len, [&](std::size_t i) { x[i] = M[start + i] <= key ? 1 : 0; }, g);
      const std::uint64_t xs = parallel::exclusive_scan_inplace(x);
      parallel::parallel_for(0, len, [&](std::size_t i) {
        if (M[start + i] > key) M2[start + xs + i - x[i]] = M[start + i];
        else M2[start + x[i]] = M[start + i];
      }, g);
      if (l_internal) A2[2 * j] = {start, xs, l.index};
      if (r_internal) A2[2 * j + 1] = {start + xs, len - xs, r.index};
    };
    auto big = parallel::pack_index(A.size(), [&](std::size_t j) { return A[j].len >= g; });
    auto small = parallel::pack_index(A.size(), [&](std::size_t j) { return A[j].len < g; });
    for (auto j : big) node(j);
    parallel::parallel_for(0, small.size(), [&](std::size_t k) { node(small[k]); }, 2);
    A = parallel::filter(std::span<const Frontier>(A2), [](const Frontier& f) { return f.len > 0; });
    // Positions outside the new frontier are never read again, so the two
    // buffers can be swapped wholesale.
    std::swap(M, M2);
  }
  if (directories) h.build_directories();
  return h;
}

HuffmanWT HuffmanWT::from_parts(std::uint64_t n, std::uint64_t sigma,
                                std::vector<std::pair<std::uint64_t, std::uint64_t>> freqs, std::vector<Bitmap> bitmaps,
                                bool directories) {
  if (sigma == 0 || sigma > (std::uint64_t{1} << 32)) fail(ErrorCode::kFormat, "sigma out of range");
  HuffmanWT h;
  h.n_ = n;
  h.sigma_ = sigma;
  std::uint64_t total = 0;
  for (const auto& [c, f] : freqs) {
    if (c >= sigma) fail(ErrorCode::kFormat, "huffman symbol >= sigma");
    total += f;
  }
  if (total != n) fail(ErrorCode::kFormat, "huffman frequencies do not sum to n");
  if (n == 0) {
    if (!freqs.empty() || !bitmaps.empty()) fail(ErrorCode::kFormat, "empty huffman tree with nodes");
    h.has_dirs_ = directories;
    return h;
  }
  h.freqs_ = std::move(freqs);
  try {
    h.tree_ = build_huffman_codes(h.freqs_);
  } catch (const Error& e) {
    fail(ErrorCode::kFormat, e.what());
  }
  h.leaf_of_.assign(h.freqs_.size(), 0);
  std::vector<std::uint64_t> leaf_weight(h.freqs_.size());
  for (std::size_t leaf = 0; leaf < h.tree_.leaf_symbol.size(); ++leaf) {
    const auto k = static_cast<std::size_t>(h.find_symbol(h.tree_.leaf_symbol[leaf]));
    h.leaf_of_[k] = leaf;
    leaf_weight[leaf] = h.freqs_[k].second;
  }
  auto w = internal_weights(h.tree_, h.freqs_, leaf_weight);
  if (bitmaps.size() != h.tree_.num_internal()) fail(ErrorCode::kFormat, "huffman node count mismatch");
  h.nodes_.resize(bitmaps.size());
  for (std::size_t k = 0; k < bitmaps.size(); ++k) {
    if (bitmaps[k].size() != w[k]) fail(ErrorCode::kFormat, "huffman node length mismatch");
    h.nodes_[k].bits = std::move(bitmaps[k]);
  }
  if (directories) h.build_directories();
  return h;
}

void HuffmanWT::build_directories() {
  parallel::parallel_for(0, nodes_.size(), [&](std::size_t k) { nodes_[k].build_directories(); }, 2);
  has_dirs_ = true;
}

std::int64_t HuffmanWT::find_symbol(std::uint64_t c) const {
  auto it = std::lower_bound(freqs_.begin(), freqs_.end(), c, [](const auto& p, std::uint64_t v) { return p.first < v; });
  if (it == freqs_.end() || it->first != c) return -1;
  return it - freqs_.begin();
}

unsigned HuffmanWT::code_length(std::uint64_t c) const {
  const auto k = find_symbol(c);
  return k < 0 ? 0 : tree_.leaf_depth[leaf_of_[static_cast<std::size_t>(k)]];
}

std::vector<std::pair<std::uint64_t, unsigned>> HuffmanWT::path_to(std::uint64_t leaf) const {
  std::vector<std::pair<std::uint64_t, unsigned>> path;
  std::uint64_t node = tree_.leaf_parent[leaf];
  path.emplace_back(node, tree_.leaf_side[leaf]);
  while (node != 0) {
    const std::uint64_t p = tree_.parent[node];
    path.emplace_back(p, tree_.left[p] == CodeChild{false, node} ? 0u : 1u);
    node = p;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

Symbol HuffmanWT::access(std::uint64_t i) const {
  if (i >= n_) fail(ErrorCode::kOutOfRange, "access position out of range");
  if (!has_dirs_) fail(ErrorCode::kInvalidArgument, "rank/select directories not built");
  std::uint64_t node = 0, pos = i;
  for (;;) {
    const auto& nd = nodes_[node];
    const bool b = nd.bits.get(pos);
    pos = b ? nd.rank.ones_before(nd.bits, pos) : nd.rank.zeros_before(nd.bits, pos);
    const CodeChild ch = b ? tree_.right[node] : tree_.left[node];
    if (ch.leaf) return static_cast<Symbol>(tree_.leaf_symbol[ch.index]);
    node = ch.index;
  }
}

std::uint64_t HuffmanWT::rank(std::uint64_t c, std::uint64_t i) const {
  if (c >= sigma_) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
  if (i >= n_) fail(ErrorCode::kOutOfRange, "rank position out of range");
  if (!has_dirs_) fail(ErrorCode::kInvalidArgument, "rank/select directories not built");
  const auto k = find_symbol(c);
  if (k < 0) return 0;
  std::uint64_t pos = i + 1;
  for (auto [node, side] : path_to(leaf_of_[static_cast<std::size_t>(k)])) {
    const auto& nd = nodes_[node];
    pos = side ? nd.rank.ones_before(nd.bits, pos) : nd.rank.zeros_before(nd.bits, pos);
    if (pos == 0) return 0;
  }
  return pos;
}

std::uint64_t HuffmanWT::select(std::uint64_t c, std::uint64_t k) const {
  if (c >= sigma_) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
  if (!has_dirs_) fail(ErrorCode::kInvalidArgument, "rank/select directories not built");
  const auto idx = find_symbol(c);
  if (idx < 0 || k == 0 || k > freqs_[static_cast<std::size_t>(idx)].second) {
    fail(ErrorCode::kNoSuchOccurrence, "no such occurrence");
  }
  auto path = path_to(leaf_of_[static_cast<std::size_t>(idx)]);
  std::uint64_t pos = k - 1;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const auto& nd = nodes_[it->first];
    pos = it->second ? nd.select1.select(nd.bits, pos + 1) : nd.select0.select(nd.bits, pos + 1);
  }
  return pos;
}

std::size_t HuffmanWT::bitmap_bits() const {
  std::size_t b = 0;
  for (const auto& nd : nodes_) b += nd.bits.size();
  return b;
}

std::size_t HuffmanWT::directory_bits() const {
  std::size_t b = 0;
  for (const auto& nd : nodes_) b += nd.directory_bits();
  return b;
}

// ---------------------------------------------------------------------------
// Wavelet matrix

namespace {

std::uint64_t reverse_bits(std::uint64_t v, unsigned bits) {
  std::uint64_t r = 0;
  for (unsigned k = 0; k < bits; ++k) r |= ((v >> k) & 1u) << (bits - 1 - k);
  return r;
}

Bitmap bit_of_order(std::span<const Symbol> order, unsigned shift) {
  Bitmap b(order.size());
  b.write_region_with(0, order.size(), [&](std::size_t i) { return ((order[i] >> shift) & 1u) != 0; });
  return b;
}

}  // namespace

WaveletMatrix WaveletMatrix::build(std::span<const Symbol> s, std::uint64_t sigma, bool directories) {
  validate_sequence(s, sigma);
  const unsigned L = levels_for_sigma(sigma);
  std::vector<Symbol> cur(s.begin(), s.end()), next(s.size());
  std::vector<Bitmap> levels;
  for (unsigned l = 0; l < L; ++l) {
    const unsigned shift = L - l - 1;
    levels.push_back(bit_of_order(cur, shift));
    if (l + 1 < L) {
      parallel::stable_partition_into(std::span<const Symbol>(cur), std::span<Symbol>(next),
                                      [shift](Symbol v) { return ((v >> shift) & 1u) != 0; });
      std::swap(cur, next);
    }
  }
  return from_parts(s.size(), sigma, std::move(levels), directories);
}

WaveletMatrix WaveletMatrix::build_by_sort(std::span<const Symbol> s, std::uint64_t sigma, bool directories) {
  validate_sequence(s, sigma);
  const unsigned L = levels_for_sigma(sigma);
  std::vector<Bitmap> levels(L);
  for (unsigned l = 0; l < L; ++l) {
    if (l == 0) {
      levels[0] = bit_of_order(s, L - 1);
      continue;
    }
    std::vector<Symbol> order(s.size());
    const unsigned shift = L - l;
    parallel::stable_sort_by_key_into(s, std::span<Symbol>(order), l,
                                      [&](Symbol v) { return reverse_bits(v >> shift, l); });
    levels[l] = bit_of_order(order, L - l - 1);
  }
  return from_parts(s.size(), sigma, std::move(levels), directories);
}

WaveletMatrix WaveletMatrix::from_parts(std::uint64_t n, std::uint64_t sigma, std::vector<Bitmap> levels,
                                        bool directories) {
  if (sigma == 0 || sigma > (std::uint64_t{1} << 32)) fail(ErrorCode::kInvalidArgument, "sigma must be in [1, 2^32]");
  if (levels.size() != levels_for_sigma(sigma)) fail(ErrorCode::kFormat, "level count does not match sigma");
  WaveletMatrix m;
  m.n_ = n;
  m.sigma_ = sigma;
  m.levels_.resize(levels.size());
  m.z_.resize(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (levels[l].size() != n) fail(ErrorCode::kFormat, "level bitmap length differs from n");
    m.z_[l] = n - levels[l].count_ones();
    m.levels_[l].bits = std::move(levels[l]);
  }
  if (directories) m.build_directories();
  return m;
}

void WaveletMatrix::build_directories() {
  for (auto& lv : levels_) lv.build_directories();
  has_dirs_ = true;
}

std::size_t WaveletMatrix::directory_bits() const {
  std::size_t b = 0;
  for (const auto& lv : levels_) b += lv.directory_bits();
  return b;
}

bool operator==(const WaveletMatrix& a, const WaveletMatrix& b) {
  if (a.n_ != b.n_ || a.sigma_ != b.sigma_ || a.z_ != b.z_ || a.levels_.size() != b.levels_.size()) return false;
  for (std::size_t l = 0; l < a.levels_.size(); ++l) {
    if (!(a.levels_[l].bits == b.levels_[l].bits)) return false;
  }
  return true;
}

Symbol WaveletMatrix::access(std::uint64_t i) const {
  if (i >= n_) fail(ErrorCode::kOutOfRange, "access position out of range");
  if (!has_dirs_) fail(ErrorCode::kInvalidArgument, "rank/select directories not built");
  Symbol c = 0;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const auto& lv = levels_[l];
    const bool b = lv.bits.get(i);
    c = static_cast<Symbol>((c << 1) | (b ? 1u : 0u));
    i = b ? z_[l] + lv.rank.ones_before(lv.bits, i) : lv.rank.zeros_before(lv.bits, i);
  }
  return c;
}

std::uint64_t WaveletMatrix::rank(std::uint64_t c, std::uint64_t i) const {
  if (c >= sigma_) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
  if (i >= n_) fail(ErrorCode::kOutOfRange, "rank position out of range");
  if (!has_dirs_) fail(ErrorCode::kInvalidArgument, "rank/select directories not built");
  const unsigned L = num_levels();
  std::uint64_t s = 0, e = i + 1;
  for (unsigned l = 0; l < L && s < e; ++l) {
    const auto& lv = levels_[l];
    if ((c >> (L - l - 1)) & 1u) {
      s = z_[l] + lv.rank.ones_before(lv.bits, s);
      e = z_[l] + lv.rank.ones_before(lv.bits, e);
    } else {
      s = lv.rank.zeros_before(lv.bits, s);
      e = lv.rank.zeros_before(lv.bits, e);
    }
  }
  return e - s;
}

std::uint64_t WaveletMatrix::select(std::uint64_t c, std::uint64_t k) const {
  if (c >= sigma_) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
  if (!has_dirs_) fail(ErrorCode::kInvalidArgument, "rank/select directories not built");
  const unsigned L = num_levels();
  std::uint64_t s = 0, e = n_;
  for (unsigned l = 0; l < L; ++l) {
    const auto& lv = levels_[l];
    if ((c >> (L - l - 1)) & 1u) {
      s = z_[l] + lv.rank.ones_before(lv.bits, s);
      e = z_[l] + lv.rank.ones_before(lv.bits, e);
    } else {
      s = lv.rank.zeros_before(lv.bits, s);
      e = lv.rank.zeros_before(lv.bits, e);
    }
  }
  if (k == 0 || k > e - s) fail(ErrorCode::kNoSuchOccurrence, "no such occurrence");
  std::uint64_t p = s + k - 1;
  for (unsigned l = L; l-- > 0;) {
    const auto& lv = levels_[l];
    if ((c >> (L - l - 1)) & 1u) p = lv.select1.select(lv.bits, p - z_[l] + 1);
    else p = lv.select0.select(lv.bits, p + 1);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Multiary wavelet tree

namespace {

using LevelNodes = std::vector<std::pair<std::uint64_t, NodeEntry>>;

// Nodes of a level whose symbols are ordered by their top `bits` bits out of
// `width`. Boundaries come from a filter on changes of those bits.
LevelNodes multiary_nodes(std::span<const Symbol> order, unsigned width, unsigned bits, std::uint64_t first_id) {
  const std::size_t n = order.size();
  if (n == 0) return bits == 0 ? LevelNodes{{0, NodeEntry{0, 0}}} : LevelNodes{};
  const unsigned shift = width - bits;
  auto prefix = [&](std::size_t i) -> std::uint64_t { return shift >= 32 ? 0 : order[i] >> shift; };
  auto bounds = parallel::pack_index(n, [&](std::size_t i) { return i == 0 || prefix(i) != prefix(i - 1); });
  LevelNodes out(bounds.size());
  parallel::parallel_for(0, bounds.size(), [&](std::size_t k) {
    const std::uint64_t lo = bounds[k];
    const std::uint64_t hi = k + 1 < bounds.size() ? bounds[k + 1] : n;
    out[k] = {first_id + prefix(lo), NodeEntry{lo, hi - lo}};
  });
  return out;
}

unsigned check_arity(unsigned d) {
  if (d < 2 || d > MultiaryWT::kMaxArity || (d & (d - 1)) != 0) {
    fail(ErrorCode::kInvalidArgument, "arity must be a power of two in [2, 256]");
  }
  return bit_width_of(d) - 1;
}

}  // namespace

MultiaryWT MultiaryWT::build(std::span<const Symbol> s, std::uint64_t sigma, unsigned d, bool directories) {
  const unsigned log_d = check_arity(d);
  validate_sequence(s, sigma);
  const unsigned L = levels_for_sigma(sigma);
  const unsigned levels = (L + log_d - 1) / log_d;
  const unsigned W = levels * log_d;
  const std::size_t n = s.size();
  MultiaryWT m;
  m.n_ = n;
  m.sigma_ = sigma;
  m.d_ = d;
  m.log_d_ = log_d;
  std::vector<Symbol> cur(s.begin(), s.end()), next(n);
  std::uint64_t first_id = 0;
  for (unsigned l = 0; l < levels; ++l) {
    if (l > 0) {
      const auto& prev = m.nodes_.back();
      std::vector<std::uint64_t> bounds(prev.size() + 1);
      parallel::parallel_for(0, prev.size(), [&](std::size_t k) { bounds[k] = prev[k].second.start; });
      bounds.back() = n;
      const unsigned shift = W - l * log_d;
      parallel::segmented_stable_sort_into(std::span<const Symbol>(cur), std::span<Symbol>(next),
                                           std::span<const std::uint64_t>(bounds), log_d,
                                           [shift, d](Symbol v) { return (std::uint64_t{v} >> shift) & (d - 1); });
      std::swap(cur, next);
    }
    BitPackedArray dig(n, log_d);
    const unsigned shift = W - (l + 1) * log_d;
    parallel::parallel_for(0, n, [&](std::size_t i) { dig.set_atomic(i, (std::uint64_t{cur[i]} >> shift) & (d - 1)); });
    m.digits_.push_back(std::move(dig));
    m.nodes_.push_back(multiary_nodes(cur, W, l * log_d, first_id));
    first_id = (first_id + 1) * d - 1;  // d^(l+1) - 1
  }
  if (directories) m.build_directories();
  return m;
}

MultiaryWT MultiaryWT::from_parts(std::uint64_t n, std::uint64_t sigma, unsigned d, std::vector<BitPackedArray> digits,
                                  bool directories) {
  const unsigned log_d = check_arity(d);
  if (sigma == 0 || sigma > (std::uint64_t{1} << 32)) fail(ErrorCode::kFormat, "sigma out of range");
  const unsigned L = levels_for_sigma(sigma);
  const unsigned levels = (L + log_d - 1) / log_d;
  if (digits.size() != levels) fail(ErrorCode::kFormat, "multiary level count mismatch");
  MultiaryWT m;
  m.n_ = n;
  m.sigma_ = sigma;
  m.d_ = d;
  m.log_d_ = log_d;
  for (const auto& dg : digits) {
    if (dg.size() != n || dg.width() != log_d) fail(ErrorCode::kFormat, "multiary digit sequence shape mismatch");
  }
  m.digits_ = std::move(digits);
  // Node table: children of a node split its range by digit value, in digit
  // order.
  if (levels > 0) m.nodes_.push_back({{0, NodeEntry{0, n}}});
  std::uint64_t first_id = 0;
  for (unsigned l = 0; l + 1 < levels; ++l) {
    const auto& cur = m.nodes_[l];
    const std::uint64_t child_first = (first_id + 1) * d - 1;
    std::vector<std::vector<std::pair<std::uint64_t, NodeEntry>>> kids(cur.size());
    parallel::parallel_for(0, cur.size(), [&](std::size_t k) {
      const auto& [id, e] = cur[k];
      std::vector<std::uint64_t> cnt(d, 0);
      for (std::uint64_t i = e.start; i < e.start + e.len; ++i) ++cnt[m.digits_[l].get(i)];
      std::uint64_t at = e.start;
      for (unsigned v = 0; v < d; ++v) {
        if (cnt[v]) kids[k].push_back({child_first + (id - first_id) * d + v, NodeEntry{at, cnt[v]}});
        at += cnt[v];
      }
    }, 2);
    LevelNodes lv;
    for (auto& kk : kids) lv.insert(lv.end(), kk.begin(), kk.end());
    m.nodes_.push_back(std::move(lv));
    first_id = child_first;
  }
  if (directories) m.build_directories();
  return m;
}

void MultiaryWT::build_directories() {
  rs_.resize(digits_.size());
  for (std::size_t l = 0; l < digits_.size(); ++l) rs_[l] = GeneralRS::build(digits_[l], d_);
  has_dirs_ = true;
}

std::size_t MultiaryWT::directory_bits() const {
  std::size_t b = 0;
  for (const auto& r : rs_) b += r.size_in_bits();
  return b;
}

unsigned MultiaryWT::digit_of(std::uint64_t c, unsigned l) const {
  const unsigned W = num_levels() * log_d_;
  return static_cast<unsigned>((c >> (W - (l + 1) * log_d_)) & (d_ - 1));
}

std::uint64_t MultiaryWT::count_le(unsigned l, std::int64_t c, std::uint64_t a, std::uint64_t b) const {
  if (c < 0 || a >= b) return 0;
  const auto cc = static_cast<unsigned>(c);
  return rs_[l].grank(digits_[l], cc, b - 1) - (a ? rs_[l].grank(digits_[l], cc, a - 1) : 0);
}

Symbol MultiaryWT::access(std::uint64_t i) const {
  if (i >= n_) fail(ErrorCode::kOutOfRange, "access position out of range");
  if (!has_dirs_) fail(ErrorCode::kInvalidArgument, "rank/select directories not built");
  std::uint64_t start = 0, len = n_, pos = i, c = 0;
  for (unsigned l = 0; l < num_levels(); ++l) {
    const unsigned dg = static_cast<unsigned>(digits_[l].get(start + pos));
    c = (c << log_d_) | dg;
    const std::int64_t below = static_cast<std::int64_t>(dg) - 1;
    const std::uint64_t pos2 = count_le(l, dg, start, start + pos) - count_le(l, below, start, start + pos);
    const std::uint64_t lt = count_le(l, below, start, start + len);
    len = count_le(l, dg, start, start + len) - lt;
    start += lt;
    pos = pos2;
  }
  return static_cast<Symbol>(c);
}

std::uint64_t MultiaryWT::rank(std::uint64_t c, std::uint64_t i) const {
  if (c >= sigma_) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
  if (i >= n_) fail(ErrorCode::kOutOfRange, "rank position out of range");
  if (!has_dirs_) fail(ErrorCode::kInvalidArgument, "rank/select directories not built");
  std::uint64_t start = 0, len = n_, pos = i + 1;
  for (unsigned l = 0; l < num_levels(); ++l) {
    const unsigned dg = digit_of(c, l);
    const std::int64_t below = static_cast<std::int64_t>(dg) - 1;
    pos = count_le(l, dg, start, start + pos) - count_le(l, below, start, start + pos);
    if (pos == 0) return 0;
    const std::uint64_t lt = count_le(l, below, start, start + len);
    len = count_le(l, dg, start, start + len) - lt;
    start += lt;
  }
  return pos;
}

std::uint64_t MultiaryWT::select(std::uint64_t c, std::uint64_t k) const {
  if (c >= sigma_) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
  if (!has_dirs_) fail(ErrorCode::kInvalidArgument, "rank/select directories not built");
  const unsigned levels = num_levels();
  std::vector<std::uint64_t> starts(levels);
  std::uint64_t start = 0, len = n_;
  for (unsigned l = 0; l < levels; ++l) {
    starts[l] = start;
    const unsigned dg = digit_of(c, l);
    const std::uint64_t lt = count_le(l, static_cast<std::int64_t>(dg) - 1, start, start + len);
    len = count_le(l, dg, start, start + len) - lt;
    start += lt;
  }
  if (k == 0 || k > len) fail(ErrorCode::kNoSuchOccurrence, "no such occurrence");
  std::uint64_t pos = k - 1;
  for (unsigned l = levels; l-- > 0;) {
    const unsigned dg = digit_of(c, l);
    const std::uint64_t s = starts[l];
    const std::uint64_t before = s ? rs_[l].rank(digits_[l], dg, s - 1) : 0;
    pos = rs_[l].gselect(digits_[l], dg, before + pos + 1) - s;
  }
  return pos;
}

}  // namespace pwt
