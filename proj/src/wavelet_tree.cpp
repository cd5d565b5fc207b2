#include "pwt/wavelet_tree.hpp"

#include <algorithm>
#include <atomic>

#include "pwt/parallel.hpp"

namespace pwt {

unsigned levels_for_sigma(std::uint64_t sigma) { return sigma <= 1 ? 0 : bit_width_of(sigma - 1); }

void validate_sequence(std::span<const Symbol> s, std::uint64_t sigma) {
  if (sigma == 0 || sigma > (std::uint64_t{1} << 32)) fail(ErrorCode::kInvalidArgument, "sigma must be in [1, 2^32]");
  std::atomic<bool> bad{false};
  parallel::parallel_for(0, s.size(), [&](std::size_t i) {
    if (s[i] >= sigma) bad.store(true, std::memory_order_relaxed);
  });
  if (bad.load()) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
}

// ---------------------------------------------------------------------------
// NodeTable

NodeTable NodeTable::from_levels(unsigned levels,
                                 std::vector<std::vector<std::pair<std::uint64_t, NodeEntry>>> per_level) {
  NodeTable t;
  t.levels_ = levels;
  std::vector<std::uint64_t> sizes(per_level.size());
  for (std::size_t l = 0; l < per_level.size(); ++l) sizes[l] = per_level[l].size();
  const std::uint64_t total = parallel::exclusive_scan_inplace(std::span<std::uint64_t>(sizes));
  t.ids_.resize(total);
  t.entries_.resize(total);
  for (std::size_t l = 0; l < per_level.size(); ++l) {
    const auto& lv = per_level[l];
    parallel::parallel_for(0, lv.size(), [&](std::size_t k) {
      t.ids_[sizes[l] + k] = lv[k].first;
      t.entries_[sizes[l] + k] = lv[k].second;
    });
  }
  for (std::size_t k = 1; k < t.ids_.size(); ++k) {
    if (t.ids_[k] <= t.ids_[k - 1]) fail(ErrorCode::kFormat, "node ids not increasing");
  }
  if (levels <= kDenseMaxLevels && levels > 0) {
    t.dense_.assign((std::size_t{1} << levels) - 1, 0);
    for (std::size_t k = 0; k < t.ids_.size(); ++k) {
      if (t.ids_[k] >= t.dense_.size()) fail(ErrorCode::kFormat, "node id beyond tree depth");
      t.dense_[t.ids_[k]] = static_cast<std::uint32_t>(k + 1);
    }
  }
  return t;
}

const NodeEntry* NodeTable::find(std::uint64_t id) const {
  if (!dense_.empty()) {
    if (id >= dense_.size() || dense_[id] == 0) return nullptr;
    return &entries_[dense_[id] - 1];
  }
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return nullptr;
  return &entries_[static_cast<std::size_t>(it - ids_.begin())];
}

// ---------------------------------------------------------------------------
// Construction

namespace {

using LevelNodes = std::vector<std::pair<std::uint64_t, NodeEntry>>;

struct Frontier {
  std::uint64_t start, len, id, range;
};

// Node table of one level of a sorted order: boundaries are where the top
// l bits change.
LevelNodes nodes_of_sorted_level(std::span<const Symbol> sorted, unsigned L, unsigned l) {
  const unsigned shift = L - l;
  auto prefix = [&](std::size_t i) -> std::uint64_t { return shift >= 32 ? 0 : sorted[i] >> shift; };
  const std::size_t n = sorted.size();
  if (n == 0) return l == 0 ? LevelNodes{{0, NodeEntry{0, 0}}} : LevelNodes{};
  auto bounds = parallel::pack_index(n, [&](std::size_t i) { return i == 0 || prefix(i) != prefix(i - 1); });
  LevelNodes out(bounds.size());
  const std::uint64_t first_id = (std::uint64_t{1} << l) - 1;
  parallel::parallel_for(0, bounds.size(), [&](std::size_t k) {
    const std::uint64_t lo = bounds[k];
    const std::uint64_t hi = k + 1 < bounds.size() ? bounds[k + 1] : n;
    out[k] = {first_id + prefix(lo), NodeEntry{lo, hi - lo}};
  });
  return out;
}

// Bit l (counted from the top of an L-bit code) of every symbol into a level
// bitmap, one word per task.
Bitmap level_bitmap_of(std::span<const Symbol> order, unsigned L, unsigned l) {
  Bitmap b(order.size());
  const unsigned shift = L - l - 1;
  b.write_region_with(0, order.size(), [&](std::size_t i) { return ((order[i] >> shift) & 1u) != 0; });
  return b;
}

}  // namespace

WaveletTree WaveletTree::build_level(std::span<const Symbol> input, std::uint64_t sigma, bool directories,
                                     BuildStats* stats) {
  validate_sequence(input, sigma);
  const unsigned L = levels_for_sigma(sigma);
  const std::size_t n = input.size();
  std::vector<Bitmap> bitmaps;
  std::vector<LevelNodes> node_levels;
  if (L > 0) {
    std::vector<Symbol> S(input.begin(), input.end()), S2(n);
    std::vector<std::uint64_t> X(n);
    std::vector<Frontier> A{{0, n, 0, std::uint64_t{1} << L}};
    std::atomic<std::uint64_t> ops{0}, partitioned{0};
    const std::size_t g = parallel::grain();
    for (unsigned l = 0; l < L; ++l) {
      const Symbol mask = Symbol{1} << (L - l - 1);
      Bitmap B(n);
      std::vector<Frontier> A2(2 * A.size(), Frontier{0, 0, 0, 0});
      LevelNodes lv(A.size());

      auto node = [&](std::size_t j) {
        const auto [start, len, id, r] = A[j];
        lv[j] = {id, NodeEntry{start, len}};
        B.write_region_with(start, len, [&](std::size_t i) { return (S[start + i] & mask) != 0; });
        if (r <= 2) return;
        std::span<std::uint64_t> x(X.data() + start, len);
        parallel::parallel_for(0, len, [&](std::size_t i) { x[i] = (S[start + i] & mask) == 0 ? 1 : 0; }, g);
        const std::uint64_t xs = parallel::exclusive_scan_inplace(x);
        parallel::parallel_for(0, len, [&](std::size_t i) {
          if (S[start + i] & mask) S2[start + xs + i - x[i]] = S[start + i];
          else S2[start + x[i]] = S[start + i];
        }, g);
        if (stats) {
          // per symbol: read S and write X; scan reads and writes X; the
          // scatter reads S and X and writes S'.
          ops.fetch_add(7 * len, std::memory_order_relaxed);
          partitioned.fetch_add(len, std::memory_order_relaxed);
        }
        if (xs > 0) A2[2 * j] = {start, xs, 2 * id + 1, r / 2};
        if (len - xs > 0) A2[2 * j + 1] = {start + xs, len - xs, 2 * id + 2, r / 2};
      };

      // Large nodes one after another, each parallel inside; small nodes in
      // parallel with each other.
      auto big = parallel::pack_index(A.size(), [&](std::size_t j) { return A[j].len >= g; });
      auto small = parallel::pack_index(A.size(), [&](std::size_t j) { return A[j].len < g; });
      for (auto j : big) node(j);
      parallel::parallel_for(0, small.size(), [&](std::size_t k) { node(small[k]); }, 2);

      A = parallel::filter(std::span<const Frontier>(A2), [](const Frontier& f) { return f.len > 0; });
      bitmaps.push_back(std::move(B));
      node_levels.push_back(std::move(lv));
      std::swap(S, S2);
    }
    if (stats) {
      stats->partition_ops += ops.load();
      stats->partitioned_symbols += partitioned.load();
    }
  }
  return from_parts(n, sigma, std::move(bitmaps), NodeTable::from_levels(L, std::move(node_levels)), directories);
}

WaveletTree WaveletTree::build_sort(std::span<const Symbol> input, std::uint64_t sigma, bool directories) {
  validate_sequence(input, sigma);
  const unsigned L = levels_for_sigma(sigma);
  std::vector<Bitmap> bitmaps(L);
  std::vector<LevelNodes> node_levels(L);
  auto level = [&](std::size_t l) {
    const auto lu = static_cast<unsigned>(l);
    if (l == 0) {
      // No sorting for the first level.
      bitmaps[0] = level_bitmap_of(input, L, 0);
      node_levels[0] = nodes_of_sorted_level(input, L, 0);
      return;
    }
    auto sorted = parallel::stable_sort_by_bits(input, L, 0, lu);
    bitmaps[l] = level_bitmap_of(sorted, L, lu);
    node_levels[l] = nodes_of_sorted_level(sorted, L, lu);
  };
  // Levels are independent. Run them side by side when there are enough of
  // them to occupy the workers, otherwise let each level use all workers.
  if (L >= static_cast<unsigned>(parallel::num_threads())) {
    parallel::parallel_for(0, L, level, 2);
  } else {
    for (unsigned l = 0; l < L; ++l) level(l);
  }
  return from_parts(input.size(), sigma, std::move(bitmaps), NodeTable::from_levels(L, std::move(node_levels)),
                    directories);
}

WaveletTree WaveletTree::build_msort(std::span<const Symbol> input, std::uint64_t sigma, bool directories) {
  validate_sequence(input, sigma);
  const unsigned L = levels_for_sigma(sigma);
  const std::size_t n = input.size();
  std::vector<Bitmap> bitmaps;
  std::vector<LevelNodes> node_levels;
  std::vector<Symbol> cur(input.begin(), input.end()), next(n);
  for (unsigned l = 0; l < L; ++l) {
    if (l > 0) {
      // Segments are the nodes of level l-1; sort each by bit l-1.
      const auto& prev = node_levels.back();
      std::vector<std::uint64_t> bounds(prev.size() + 1);
      parallel::parallel_for(0, prev.size(), [&](std::size_t k) { bounds[k] = prev[k].second.start; });
      bounds.back() = n;
      const unsigned shift = L - l;
      parallel::segmented_stable_sort_into(std::span<const Symbol>(cur), std::span<Symbol>(next),
                                           std::span<const std::uint64_t>(bounds), 1,
                                           [shift](Symbol v) { return (v >> shift) & 1u; });
      std::swap(cur, next);
    }
    bitmaps.push_back(level_bitmap_of(cur, L, l));
    node_levels.push_back(nodes_of_sorted_level(cur, L, l));
  }
  return from_parts(n, sigma, std::move(bitmaps), NodeTable::from_levels(L, std::move(node_levels)), directories);
}

WaveletTree WaveletTree::from_parts(std::uint64_t n, std::uint64_t sigma, std::vector<Bitmap> levels,
                                    NodeTable nodes, bool directories) {
  if (sigma == 0 || sigma > (std::uint64_t{1} << 32)) fail(ErrorCode::kInvalidArgument, "sigma must be in [1, 2^32]");
  if (levels.size() != levels_for_sigma(sigma) || nodes.levels() != levels.size()) {
    fail(ErrorCode::kFormat, "level count does not match sigma");
  }
  WaveletTree t;
  t.n_ = n;
  t.sigma_ = sigma;
  t.levels_.resize(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (levels[l].size() != n) fail(ErrorCode::kFormat, "level bitmap length differs from n");
    t.levels_[l].bits = std::move(levels[l]);
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& e = nodes.entry_at(k);
    if (node_level(nodes.id_at(k)) >= levels.size() || e.start > n || e.len > n - e.start) {
      fail(ErrorCode::kFormat, "node entry out of range");
    }
  }
  t.nodes_ = std::move(nodes);
  if (directories) t.build_directories();
  return t;
}

void WaveletTree::build_directories() {
  for (auto& lv : levels_) lv.build_directories();
  has_dirs_ = true;
}

std::size_t WaveletTree::directory_bits() const {
  std::size_t b = 0;
  for (const auto& lv : levels_) b += lv.directory_bits();
  return b;
}

bool WaveletTree::same_structure(const WaveletTree& o) const {
  if (n_ != o.n_ || sigma_ != o.sigma_ || levels_.size() != o.levels_.size() || !(nodes_ == o.nodes_)) return false;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    if (!(levels_[l].bits == o.levels_[l].bits)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Queries. A node on level l is tracked as (start, len); the left child
// starts where its parent does on the next level and the right child
// follows the parent's zeros.

void WaveletTree::require_dirs() const {
  if (!has_dirs_) fail(ErrorCode::kInvalidArgument, "rank/select directories not built");
}

Symbol WaveletTree::access(std::uint64_t i) const {
  if (i >= n_) fail(ErrorCode::kOutOfRange, "access position out of range");
  require_dirs();
  std::uint64_t start = 0, len = n_, pos = i;
  Symbol c = 0;
  for (const auto& lv : levels_) {
    const std::uint64_t ob = lv.rank.ones_before(lv.bits, start);
    const std::uint64_t ones = lv.rank.ones_before(lv.bits, start + len) - ob;
    const bool bit = lv.bits.get(start + pos);
    const std::uint64_t ones_pre = lv.rank.ones_before(lv.bits, start + pos) - ob;
    c = static_cast<Symbol>((c << 1) | (bit ? 1u : 0u));
    if (bit) {
      pos = ones_pre;
      start += len - ones;
      len = ones;
    } else {
      pos -= ones_pre;
      len -= ones;
    }
  }
  return c;
}

std::uint64_t WaveletTree::rank(std::uint64_t c, std::uint64_t i) const {
  if (c >= sigma_) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
  if (i >= n_) fail(ErrorCode::kOutOfRange, "rank position out of range");
  require_dirs();
  const unsigned L = num_levels();
  std::uint64_t start = 0, len = n_, pos = i + 1;
  for (unsigned l = 0; l < L; ++l) {
    const auto& lv = levels_[l];
    const std::uint64_t ob = lv.rank.ones_before(lv.bits, start);
    const std::uint64_t ones = lv.rank.ones_before(lv.bits, start + len) - ob;
    const std::uint64_t ones_pre = lv.rank.ones_before(lv.bits, start + pos) - ob;
    if ((c >> (L - l - 1)) & 1u) {
      pos = ones_pre;
      start += len - ones;
      len = ones;
    } else {
      pos -= ones_pre;
      len -= ones;
    }
    if (pos == 0) return 0;
  }
  return pos;
}

std::uint64_t WaveletTree::select(std::uint64_t c, std::uint64_t k) const {
  if (c >= sigma_) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
  require_dirs();
  const unsigned L = num_levels();
  std::vector<std::uint64_t> starts(L);
  std::uint64_t start = 0, len = n_;
  for (unsigned l = 0; l < L; ++l) {
    const auto& lv = levels_[l];
    starts[l] = start;
    const std::uint64_t ones = lv.rank.ones_before(lv.bits, start + len) - lv.rank.ones_before(lv.bits, start);
    if ((c >> (L - l - 1)) & 1u) {
      start += len - ones;
      len = ones;
    } else {
      len -= ones;
    }
  }
  if (k == 0 || k > len) fail(ErrorCode::kNoSuchOccurrence, "no such occurrence");
  std::uint64_t pos = k - 1;  // position inside the current node
  for (unsigned l = L; l-- > 0;) {
    const auto& lv = levels_[l];
    const std::uint64_t s = starts[l];
    if ((c >> (L - l - 1)) & 1u) {
      pos = lv.select1.select(lv.bits, lv.rank.ones_before(lv.bits, s) + pos + 1) - s;
    } else {
      pos = lv.select0.select(lv.bits, lv.rank.zeros_before(lv.bits, s) + pos + 1) - s;
    }
  }
  return pos;
}

}  // namespace pwt
