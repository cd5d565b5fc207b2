#include "pwt/packed_wt.hpp"

#include <atomic>
#include <bit>
#include <cmath>

#include "pwt/parallel.hpp"

namespace pwt {

namespace {

std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

unsigned floor_log2(std::uint64_t n) { return n < 2 ? 1 : bit_width_of(n) - 1; }

}  // namespace

// ---------------------------------------------------------------------------
// PackedList

PackedList::PackedList(unsigned b) : width_(b) {
  if (b == 0 || b > kMaxWidth) fail(ErrorCode::kInvalidArgument, "packed list width must be in [1, 32]");
}

PackedList PackedList::zeros(unsigned b, std::size_t count) {
  PackedList p(b);
  p.count_ = count;
  p.words_.assign(words_for(count * b), 0);
  return p;
}

PackedList PackedList::from_values(unsigned b, std::span<const std::uint64_t> values) {
  PackedList p = zeros(b, values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >> b) fail(ErrorCode::kInvalidArgument, "value does not fit the packed width");
    p.or_bits_atomic(i * b, values[i], b);
  }
  return p;
}

std::vector<std::uint64_t> PackedList::values() const {
  std::vector<std::uint64_t> out(count_);
  for (std::size_t i = 0; i < count_; ++i) out[i] = get(i);
  return out;
}

std::uint64_t PackedList::read_bits(std::size_t pos, unsigned bits) const {
  if (bits == 0) return 0;
  const std::size_t w = pos / kWordBits;
  const unsigned off = pos % kWordBits;
  std::uint64_t v = words_[w] >> off;
  if (off + bits > kWordBits) v |= words_[w + 1] << (kWordBits - off);
  return v & low_mask(bits);
}

unsigned PackedList::or_bits_atomic(std::size_t pos, std::uint64_t value, unsigned bits) {
  if (bits == 0) return 0;
  value &= low_mask(bits);
  const std::size_t w = pos / kWordBits;
  const unsigned off = pos % kWordBits;
  std::atomic_ref<std::uint64_t>(words_[w]).fetch_or(value << off, std::memory_order_relaxed);
  if (off + bits <= kWordBits) return 1;
  std::atomic_ref<std::uint64_t>(words_[w + 1]).fetch_or(value >> (kWordBits - off), std::memory_order_relaxed);
  return 2;
}

void PackedList::push_back(std::uint64_t v) {
  if (v >> width_) fail(ErrorCode::kInvalidArgument, "value does not fit the packed width");
  const std::size_t pos = count_ * width_;
  words_.resize(words_for(pos + width_), 0);
  or_bits_atomic(pos, v, width_);
  ++count_;
}

void PackedList::append(const PackedList& c) {
  if (c.width_ != width_) fail(ErrorCode::kInvalidArgument, "packed list width mismatch");
  const std::size_t at = count_ * width_;
  words_.resize(words_for(at + c.count_ * width_), 0);
  const std::size_t w = at / kWordBits;
  const unsigned off = at % kWordBits;
  for (std::size_t k = 0; k < c.words_.size(); ++k) {
    words_[w + k] |= c.words_[k] << off;
    if (off && w + k + 1 < words_.size()) words_[w + k + 1] |= c.words_[k] >> (kWordBits - off);
  }
  count_ += c.count_;
}

std::vector<PackedList> PackedList::split(std::size_t k) const {
  if (k == 0) fail(ErrorCode::kInvalidArgument, "split length must be positive");
  const std::size_t chunks = (count_ + k - 1) / k;
  std::vector<PackedList> out(chunks);
  parallel::parallel_for(0, chunks, [&](std::size_t c) {
    const std::size_t lo = c * k;
    const std::size_t len = std::min(k, count_ - lo);
    PackedList p = zeros(width_, len);
    const std::size_t bits = len * width_;
    for (std::size_t b = 0; b < bits; b += kWordBits) {
      const unsigned take = static_cast<unsigned>(std::min<std::size_t>(kWordBits, bits - b));
      p.words_[b / kWordBits] = read_bits(lo * width_ + b, take);
    }
    out[c] = std::move(p);
  }, 64);
  return out;
}

PackedList packed_append(PackedList a, const PackedList& c) {
  a.append(c);
  return a;
}

// ---------------------------------------------------------------------------
// SplitTable

unsigned SplitTable::tau_for(std::uint64_t n) {
  const unsigned lg = floor_log2(n);
  unsigned t = static_cast<unsigned>(std::sqrt(static_cast<double>(lg)));
  while ((t + 1) * (t + 1) <= lg) ++t;
  while (t * t > lg) --t;
  return std::max(1u, t);
}

std::size_t SplitTable::entries_for(unsigned tau, unsigned block) {
  std::size_t total = 0;
  for (unsigned m = 1; m <= block; ++m) {
    if (m * tau >= 48) return ~std::size_t{0};
    total += (std::size_t{1} << (m * tau)) * tau;
  }
  return total;
}

unsigned SplitTable::block_for(unsigned tau, std::uint64_t n) {
  if (tau == 0) fail(ErrorCode::kInvalidArgument, "tau must be positive");
  unsigned b = std::max(1u, floor_log2(n) / (2 * tau));
  while (b > 1 && (tau * b > kMaxBlockBits || entries_for(tau, b) > kMaxEntries)) --b;
  return b;
}

SplitTable SplitTable::build(unsigned tau, unsigned block) {
  if (tau == 0 || block == 0) fail(ErrorCode::kInvalidArgument, "tau and block must be positive");
  if (tau * block > kMaxBlockBits) fail(ErrorCode::kInvalidArgument, "tau * block exceeds 32 bits");
  if (entries_for(tau, block) > kMaxEntries) fail(ErrorCode::kInvalidArgument, "split table too large");
  SplitTable t;
  t.tau_ = tau;
  t.block_ = block;
  t.offset_.assign(block + 1, 0);
  std::size_t at = 0;
  for (unsigned m = 1; m <= block; ++m) {
    t.offset_[m] = at;
    at += (std::size_t{1} << (m * tau)) * tau;
  }
  t.entries_.resize(at);
  for (unsigned m = 1; m <= block; ++m) {
    const std::size_t patterns = std::size_t{1} << (m * tau);
    // Each bit-string is evaluated on its own; all of them in parallel.
    parallel::parallel_for(0, patterns, [&](std::size_t p) {
      for (unsigned bit = 0; bit < tau; ++bit) {
        const unsigned shift = tau - 1 - bit;
        SplitEntry e;
        std::uint64_t zeros = 0, ones = 0;
        unsigned nz = 0, no = 0;
        for (unsigned i = 0; i < m; ++i) {
          const std::uint64_t v = (p >> (i * tau)) & low_mask(tau);
          if ((v >> shift) & 1u) {
            e.bitmap |= std::uint32_t{1} << i;
            ones |= v << (no++ * tau);
          } else {
            zeros |= v << (nz++ * tau);
          }
        }
        e.parts = static_cast<std::uint32_t>(zeros | (ones << (nz * tau)));
        t.entries_[t.offset_[m] + p * tau + bit] = e;
      }
    });
  }
  return t;
}

// ---------------------------------------------------------------------------
// build_packed

namespace {

struct ShortNode {
  std::uint64_t id = 0;
  PackedList keys;
};

// Runs f(k) for every task: large ones one after another (each parallel
// inside), small ones in parallel with each other.
template <class Len, class F>
void schedule(std::size_t count, Len&& len, F&& f) {
  const std::size_t g = parallel::grain();
  auto big = parallel::pack_index(count, [&](std::size_t k) { return len(k) >= g; });
  auto small = parallel::pack_index(count, [&](std::size_t k) { return len(k) < g; });
  for (auto k : big) f(k);
  parallel::parallel_for(0, small.size(), [&](std::size_t j) { f(small[j]); }, 2);
}

}  // namespace

PackedTree build_packed(std::span<const Symbol> s, std::uint64_t sigma, const PackedOptions& opt, PackedStats* stats) {
  validate_sequence(s, sigma);
  const unsigned L = levels_for_sigma(sigma);
  const std::size_t n = s.size();
  PackedTree out;
  out.n = n;
  out.sigma = sigma;
  out.per_level.resize(L);

  const unsigned tau = opt.tau ? opt.tau : SplitTable::tau_for(n);
  if (tau > PackedList::kMaxWidth) fail(ErrorCode::kInvalidArgument, "tau above 32");
  const unsigned block = opt.block ? opt.block : SplitTable::block_for(tau, n);
  if (stats) {
    *stats = PackedStats{};
    stats->tau = tau;
    stats->block = block;
  }
  if (L == 0) return out;
  if (n == 0) {
    out.per_level[0].emplace_back(0, Bitmap(0));
    if (stats) stats->big_levels.push_back(0);
    return out;
  }

  // One table per key width that has levels below its big node.
  SplitTable full, partial;
  if (tau >= 2 && L >= 2) full = SplitTable::build(std::min(tau, L), block);
  const unsigned rest = L % tau;
  if (rest >= 2 && L > tau) partial = SplitTable::build(rest, block);

  std::vector<Symbol> cur(s.begin(), s.end()), next(n);
  std::vector<std::uint64_t> X(n);
  std::atomic<std::uint64_t> big_ops{0}, short_ops{0}, short_syms{0};

  for (unsigned l0 = 0; l0 < L; l0 += tau) {
    const unsigned w = std::min(tau, L - l0);
    const SplitTable& table = (w == tau || L <= tau) ? full : partial;
    if (stats) stats->big_levels.push_back(l0);

    auto prefix = [&](std::size_t i) -> std::uint64_t { return l0 == 0 ? 0 : cur[i] >> (L - l0); };
    auto key = [&](Symbol v) -> std::uint64_t { return (v >> (L - l0 - w)) & low_mask(w); };
    auto bounds = parallel::pack_index(n, [&](std::size_t i) { return i == 0 || prefix(i) != prefix(i - 1); });
    bounds.push_back(n);
    const std::size_t nbig = bounds.size() - 1;
    big_ops += 2 * n;

    // Big nodes: bitmap from the top key bit; children short lists by a
    // prefix sum over that bit.
    auto& level = out.per_level[l0];
    level.resize(nbig);
    std::vector<ShortNode> frontier(w >= 2 ? 2 * nbig : 0);
    const std::uint64_t first_id = (std::uint64_t{1} << l0) - 1;
    schedule(nbig, [&](std::size_t b) { return bounds[b + 1] - bounds[b]; }, [&](std::size_t b) {
      const std::size_t lo = bounds[b], len = bounds[b + 1] - bounds[b];
      const std::uint64_t id = first_id + prefix(lo);
      Bitmap bm(len);
      bm.write_region_with(0, len, [&](std::size_t k) { return ((key(cur[lo + k]) >> (w - 1)) & 1u) != 0; });
      level[b] = {id, std::move(bm)};
      std::uint64_t ops = len + words_for(len);
      if (w >= 2) {
        std::span<std::uint64_t> x(X.data() + lo, len);
        parallel::parallel_for(0, len, [&](std::size_t k) { x[k] = ((key(cur[lo + k]) >> (w - 1)) & 1u) ? 0 : 1; });
        const std::uint64_t zeros = parallel::exclusive_scan_inplace(x);
        PackedList c0 = PackedList::zeros(w, zeros), c1 = PackedList::zeros(w, len - zeros);
        parallel::parallel_for(0, len, [&](std::size_t k) {
          const std::uint64_t v = key(cur[lo + k]);
          if ((v >> (w - 1)) & 1u) c1.or_bits_atomic((k - x[k]) * w, v, w);
          else c0.or_bits_atomic(x[k] * w, v, w);
        });
        ops += 5 * len;
        frontier[2 * b] = {2 * id + 1, std::move(c0)};
        frontier[2 * b + 1] = {2 * id + 2, std::move(c1)};
      }
      big_ops += ops;
    });
    frontier = parallel::filter(std::span<const ShortNode>(frontier), [](const ShortNode& t) { return !t.keys.empty(); });

    // Short-list levels below the big nodes.
    for (unsigned j = 1; j < w; ++j) {
      const bool has_children = j + 1 < w;
      auto& lv = out.per_level[l0 + j];
      lv.resize(frontier.size());
      std::vector<ShortNode> children(has_children ? 2 * frontier.size() : 0);
      const unsigned B = table.block();
      schedule(frontier.size(), [&](std::size_t k) { return frontier[k].keys.size(); }, [&](std::size_t k) {
        const PackedList& keys = frontier[k].keys;
        const std::uint64_t id = frontier[k].id;
        const std::size_t N = keys.size();
        const std::size_t nblk = (N + B - 1) / B;
        auto block_len = [&](std::size_t q) { return static_cast<unsigned>(std::min<std::size_t>(B, N - q * B)); };
        std::vector<SplitEntry> res(nblk);
        std::vector<std::uint64_t> c0(nblk);
        parallel::parallel_for(0, nblk, [&](std::size_t q) {
          const unsigned m = block_len(q);
          const SplitEntry& e = table.lookup(m, keys.read_bits(q * B * w, m * w), j);
          res[q] = e;
          c0[q] = m - static_cast<unsigned>(std::popcount(e.bitmap));
        });
        const std::uint64_t zeros = parallel::exclusive_scan_inplace(std::span<std::uint64_t>(c0));
        Bitmap bm(N);
        PackedList left = has_children ? PackedList::zeros(w, zeros) : PackedList{};
        PackedList right = has_children ? PackedList::zeros(w, N - zeros) : PackedList{};
        std::atomic<std::uint64_t> copies{0};
        parallel::parallel_for(0, nblk, [&](std::size_t q) {
          const unsigned m = block_len(q);
          const SplitEntry e = res[q];
          const std::uint64_t off0 = c0[q];
          const unsigned z = m - static_cast<unsigned>(std::popcount(e.bitmap));
          bm.or_bits_atomic(q * B, e.bitmap, m);
          unsigned touched = 1 + ((q * B) % kWordBits + m > kWordBits ? 1 : 0);
          if (has_children) {
            touched += left.or_bits_atomic(off0 * w, e.parts, z * w);
            touched += right.or_bits_atomic((q * B - off0) * w, std::uint64_t{e.parts} >> (z * w), (m - z) * w);
          }
          copies.fetch_add(touched, std::memory_order_relaxed);
        });
        // Per block: packed read, lookup, result store, two scan passes,
        // result reload, plus every word written.
        short_ops += 6 * nblk + copies.load();
        short_syms += N;
        lv[k] = {id, std::move(bm)};
        if (has_children) {
          children[2 * k] = {2 * id + 1, std::move(left)};
          children[2 * k + 1] = {2 * id + 2, std::move(right)};
        }
      });
      frontier = parallel::filter(std::span<const ShortNode>(children), [](const ShortNode& t) { return !t.keys.empty(); });
    }

    // Next layer of big nodes: stable sort by this layer's key inside every
    // big node.
    if (l0 + w < L) {
      parallel::segmented_stable_sort_into(std::span<const Symbol>(cur), std::span<Symbol>(next),
                                           std::span<const std::uint64_t>(bounds), w,
                                           [&](Symbol v) { return key(v); });
      std::swap(cur, next);
      big_ops += 3 * n * ((w + 7) / 8);
    }
  }
  if (stats) {
    stats->big_node_ops = big_ops.load();
    stats->short_list_ops = short_ops.load();
    stats->short_list_symbol_levels = short_syms.load();
  }
  return out;
}

WaveletTree to_wavelet_tree(const PackedTree& t, bool directories) {
  const std::size_t L = t.per_level.size();
  std::vector<Bitmap> levels;
  std::vector<std::vector<std::pair<std::uint64_t, NodeEntry>>> table(L);
  for (std::size_t l = 0; l < L; ++l) {
    const auto& nodes = t.per_level[l];
    std::vector<std::uint64_t> starts(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) starts[k] = nodes[k].second.size();
    const std::uint64_t total = parallel::exclusive_scan_inplace(std::span<std::uint64_t>(starts));
    if (total != t.n) fail(ErrorCode::kInvalidArgument, "node bitmaps do not cover the level");
    Bitmap level(t.n);
    table[l].resize(nodes.size());
    parallel::parallel_for(0, nodes.size(), [&](std::size_t k) {
      const Bitmap& b = nodes[k].second;
      level.write_region_with(starts[k], b.size(), [&](std::size_t i) { return b.get(i); });
      table[l][k] = {nodes[k].first, NodeEntry{starts[k], b.size()}};
    }, 2);
    levels.push_back(std::move(level));
  }
  return WaveletTree::from_parts(t.n, t.sigma, std::move(levels),
                                 NodeTable::from_levels(static_cast<unsigned>(L), std::move(table)), directories);
}

}  // namespace pwt
