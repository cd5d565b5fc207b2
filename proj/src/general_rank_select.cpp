#include "pwt/general_rank_select.hpp"

#include <algorithm>
#include <atomic>

#include "pwt/parallel.hpp"
#include "pwt/rank_select.hpp"

namespace pwt {

namespace {

constexpr unsigned ceil_log2(std::uint64_t v) { return v <= 1 ? 0 : bit_width_of(v - 1); }

// rows holds (items + 1) vectors of sigma counts; item r's own counts sit in
// row r and the last row is zero. Afterwards row r is the sum of the rows
// before it and the last row is the total. Blocked two-pass scan.
void scan_rows(std::vector<std::uint32_t>& rows, std::size_t items, unsigned sigma) {
  if (items == 0) return;
  const std::size_t block = parallel::block_size_for(items);
  const std::size_t nb = (items + block - 1) / block;
  std::vector<std::uint64_t> sums(nb * sigma, 0);
  parallel::for_blocks(items, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    std::uint64_t* run = sums.data() + b * sigma;
    for (std::size_t r = lo; r < hi; ++r) {
      for (unsigned c = 0; c < sigma; ++c) {
        const std::uint64_t v = rows[r * sigma + c];
        rows[r * sigma + c] = static_cast<std::uint32_t>(run[c]);
        run[c] += v;
      }
    }
  });
  std::vector<std::uint64_t> run(sigma, 0);
  for (std::size_t b = 0; b < nb; ++b) {
    for (unsigned c = 0; c < sigma; ++c) {
      const std::uint64_t v = sums[b * sigma + c];
      sums[b * sigma + c] = run[c];
      run[c] += v;
      if (run[c] > 0xffffffffu) fail(ErrorCode::kOverflow, "count exceeds 32 bits");
    }
  }
  parallel::for_blocks(items, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    const std::uint64_t* add = sums.data() + b * sigma;
    for (std::size_t r = lo; r < hi; ++r) {
      for (unsigned c = 0; c < sigma; ++c) rows[r * sigma + c] += static_cast<std::uint32_t>(add[c]);
    }
  });
  for (unsigned c = 0; c < sigma; ++c) rows[items * sigma + c] = static_cast<std::uint32_t>(run[c]);
}

}  // namespace

unsigned symbol_width(std::uint64_t sigma) { return std::max(1u, ceil_log2(sigma)); }

BitPackedArray pack_symbols(std::span<const std::uint32_t> s, std::uint64_t sigma) {
  BitPackedArray a(s.size(), symbol_width(sigma));
  parallel::parallel_for(0, s.size(), [&](std::size_t i) {
    if (s[i] >= sigma) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
    a.set_atomic(i, s[i]);
  });
  return a;
}

void GeneralRS::init_params() {
  const std::uint64_t L = log_param(n_);
  const std::uint64_t LL = loglog_param(n_);
  const std::uint64_t lg = symbol_width(sigma_);
  const std::uint64_t sg = sigma_;
  width_ = static_cast<unsigned>(lg);
  // Literal block length, raised so the block directory stays within about
  // 64 bits per symbol for the larger alphabets.
  block_len_ = std::max<std::uint64_t>({1, L / (3 * lg), (sg + 1) / 2});
  super_len_ = block_len_ * ((sg * L * L + block_len_ - 1) / block_len_);
  g1_ = sg * L * L;
  explicit_range_ = sg * sg * L * L * L * L;
  g2_ = sg * LL * LL;
  explicit_sub_ = sg * sg * sg * LL * LL * LL * LL;
}

void GeneralRS::build_table() {
  table_.clear();
  const std::uint64_t pattern_bits = block_len_ * width_;
  if (pattern_bits > kMaxTableKeyBits) return;
  const std::uint64_t patterns = std::uint64_t{1} << pattern_bits;
  const std::uint64_t row = (block_len_ + 1) * sigma_;
  if (patterns * row > (std::uint64_t{1} << kMaxTableKeyBits) || block_len_ > 255) return;
  table_.assign(patterns * row, 0);
  parallel::parallel_for(0, patterns, [&](std::size_t p) {
    std::uint8_t* out = table_.data() + p * row;
    std::vector<std::uint8_t> cnt(sigma_, 0);  // symbols == c among the first j
    for (std::uint64_t j = 0; j <= block_len_; ++j) {
      std::uint8_t acc = 0;
      for (unsigned c = 0; c < sigma_; ++c) {
        acc = static_cast<std::uint8_t>(acc + cnt[c]);
        out[j * sigma_ + c] = acc;
      }
      if (j < block_len_) {
        const std::uint64_t sym = (p >> (j * width_)) & low_mask(width_);
        if (sym < sigma_) ++cnt[sym];
      }
    }
  }, 64);
}

std::uint64_t GeneralRS::in_block(const BitPackedArray& s, std::uint64_t pos, std::uint64_t j, unsigned c) const {
  if (j == 0) return 0;
  if (!table_.empty()) {
    const std::uint64_t pattern = s.bits().read_bits(pos * width_, static_cast<unsigned>(j * width_));
    return table_[(pattern * (block_len_ + 1) + j) * sigma_ + c];
  }
  std::uint64_t r = 0;
  for (std::uint64_t q = 0; q < j; ++q) r += s.get(pos + q) <= c;
  return r;
}

GeneralRS GeneralRS::build(const BitPackedArray& s, unsigned sigma, GeneralStats* stats) {
  if (sigma == 0 || sigma > kMaxSigma) fail(ErrorCode::kInvalidArgument, "general rank/select needs sigma in [1, 256]");
  if (s.width() != symbol_width(sigma)) fail(ErrorCode::kInvalidArgument, "symbol width does not match sigma");
  if (s.size() >= (std::uint64_t{1} << 32)) fail(ErrorCode::kOverflow, "sequence too long");
  GeneralRS g;
  g.n_ = s.size();
  g.sigma_ = sigma;
  g.init_params();
  g.build_table();
  const std::uint64_t n = g.n_;
  const unsigned sg = sigma;
  const std::uint64_t b = g.block_len_;
  std::atomic<std::uint64_t> ops{0};
  auto count = [&](std::uint64_t v) {
    if (stats) ops.fetch_add(v, std::memory_order_relaxed);
  };

  // ---- rank: per-block cumulative count vectors, then a prefix sum.
  const std::uint64_t nb = n / b;
  g.block_.assign((nb + 1) * sg, 0);
  parallel::parallel_for(0, nb, [&](std::size_t blk) {
    std::uint32_t* row = g.block_.data() + blk * sg;
    if (!g.table_.empty()) {
      const std::uint64_t pattern = s.bits().read_bits(blk * b * g.width_, static_cast<unsigned>(b * g.width_));
      const std::uint8_t* t = g.table_.data() + (pattern * (b + 1) + b) * sg;
      for (unsigned c = 0; c < sg; ++c) row[c] = t[c];
      count(1 + sg);
    } else {
      for (std::uint64_t q = 0; q < b; ++q) ++row[s.get(blk * b + q)];
      for (unsigned c = 1; c < sg; ++c) row[c] += row[c - 1];
      count(b + sg);
    }
  }, 256);
  scan_rows(g.block_, nb, sg);
  count(2 * (nb + 1) * sg);

  const std::uint64_t per_super = g.super_len_ / b;
  const std::uint64_t ns = n / g.super_len_ + 1;
  g.super_.assign(ns * sg, 0);
  parallel::parallel_for(0, ns, [&](std::size_t k) {
    for (unsigned c = 0; c < sg; ++c) g.super_[k * sg + c] = g.block_[k * per_super * sg + c];
  });
  parallel::parallel_for(0, nb + 1, [&](std::size_t j) {
    const std::uint64_t* sup = g.super_.data() + (j / per_super) * sg;
    for (unsigned c = 0; c < sg; ++c) g.block_[j * sg + c] -= static_cast<std::uint32_t>(sup[c]);
  }, 256);
  count((nb + 1) * sg + ns * sg);

  // ---- select: counts per chunk of sigma symbols, prefix sum over chunks.
  const std::uint64_t chunk = sg;
  const std::uint64_t nch = (n + chunk - 1) / chunk;
  std::vector<std::uint32_t> before((nch + 1) * sg, 0);
  parallel::parallel_for(0, nch, [&](std::size_t q) {
    const std::uint64_t hi = std::min(n, (q + 1) * chunk);
    for (std::uint64_t i = q * chunk; i < hi; ++i) ++before[q * sg + s.get(i)];
  }, 256);
  scan_rows(before, nch, sg);
  count(n + 2 * (nch + 1) * sg);

  g.freq_.assign(sg, 0);
  g.last_.assign(sg, 0);
  g.coarse_begin_.assign(sg + 1, 0);
  for (unsigned c = 0; c < sg; ++c) {
    g.freq_[c] = before[nch * sg + c];
    g.coarse_begin_[c + 1] = g.coarse_begin_[c] + (g.freq_[c] + g.g1_ - 1) / g.g1_;
  }
  const std::uint64_t nranges = g.coarse_begin_[sg];
  g.coarse_.assign(nranges, 0);

  // Visits every symbol with its character and occurrence index.
  auto for_each_occurrence = [&](auto&& f) {
    parallel::parallel_for(0, nch, [&](std::size_t q) {
      std::vector<std::uint64_t> local(before.begin() + q * sg, before.begin() + (q + 1) * sg);
      const std::uint64_t hi = std::min(n, (q + 1) * chunk);
      for (std::uint64_t i = q * chunk; i < hi; ++i) {
        const auto c = static_cast<unsigned>(s.get(i));
        f(i, c, local[c]++);
      }
    }, 256);
    count(n);
  };

  for_each_occurrence([&](std::uint64_t i, unsigned c, std::uint64_t t) {
    if (t % g.g1_ == 0) g.coarse_[g.coarse_begin_[c] + t / g.g1_] = i;
    if (t + 1 == g.freq_[c]) g.last_[c] = i;
  });

  std::vector<std::uint16_t> range_char(nranges);
  for (unsigned c = 0; c < sg; ++c) {
    parallel::parallel_for(g.coarse_begin_[c], g.coarse_begin_[c + 1],
                           [&](std::size_t r) { range_char[r] = static_cast<std::uint16_t>(c); });
  }
  auto range_count = [&](std::uint64_t ri) {
    const unsigned c = range_char[ri];
    return std::min(g.g1_, g.freq_[c] - (ri - g.coarse_begin_[c]) * g.g1_);
  };
  auto nsub_of = [&](std::uint64_t ri) { return (range_count(ri) + g.g2_ - 1) / g.g2_; };

  // Pass A: explicit ranges store every answer, the others their second
  // level samples plus one payload slot per sub-range.
  g.payload_.assign(nranges, 0);
  parallel::parallel_for(0, nranges, [&](std::size_t ri) {
    const unsigned c = range_char[ri];
    const std::uint64_t span = g.range_span(c, ri - g.coarse_begin_[c]);
    if (g.range_explicit(span)) g.payload_[ri] = range_count(ri) - 1;
    else g.payload_[ri] = 2 * nsub_of(ri) - 1;
  });
  const std::uint64_t total_a = parallel::exclusive_scan_inplace(std::span<std::uint64_t>(g.payload_));
  if (total_a >= kNoPayload) fail(ErrorCode::kOverflow, "select payload too large");
  g.pool_.assign(total_a, kNoPayload);

  for_each_occurrence([&](std::uint64_t i, unsigned c, std::uint64_t t) {
    const std::uint64_t ri = g.coarse_begin_[c] + t / g.g1_;
    const std::uint64_t j = t % g.g1_;
    if (j == 0) return;
    const std::uint64_t base = g.coarse_[ri];
    if (g.range_explicit(g.range_span(c, t / g.g1_))) {
      g.pool_[g.payload_[ri] + j - 1] = static_cast<std::uint32_t>(i - base);
    } else if (j % g.g2_ == 0) {
      g.pool_[g.payload_[ri] + j / g.g2_ - 1] = static_cast<std::uint32_t>(i - base);
    }
  });

  // Pass B: sub-ranges wide enough to store their answers.
  auto sub_bounds = [&](std::uint64_t ri, std::uint64_t sidx, std::uint64_t nsub, std::uint64_t span) {
    const std::uint64_t lo = sidx ? g.pool_[g.payload_[ri] + sidx - 1] : 0;
    const std::uint64_t hi = sidx + 1 < nsub ? g.pool_[g.payload_[ri] + sidx] : span;
    return std::pair<std::uint64_t, std::uint64_t>{lo, hi};
  };
  std::vector<std::uint64_t> extra(nranges, 0);
  parallel::parallel_for(0, nranges, [&](std::size_t ri) {
    const unsigned c = range_char[ri];
    const std::uint64_t span = g.range_span(c, ri - g.coarse_begin_[c]);
    if (g.range_explicit(span)) return;
    const std::uint64_t nsub = nsub_of(ri), cnt = range_count(ri);
    for (std::uint64_t sidx = 0; sidx < nsub; ++sidx) {
      auto [lo, hi] = sub_bounds(ri, sidx, nsub, span);
      if (g.sub_explicit(hi - lo)) extra[ri] += std::min(g.g2_, cnt - sidx * g.g2_) - 1;
    }
  });
  const std::uint64_t total_b = parallel::exclusive_scan_inplace(std::span<std::uint64_t>(extra));
  if (total_a + total_b >= kNoPayload) fail(ErrorCode::kOverflow, "select payload too large");
  if (total_b > 0) {
    g.pool_.resize(total_a + total_b, 0);
    parallel::parallel_for(0, nranges, [&](std::size_t ri) {
      const unsigned c = range_char[ri];
      const std::uint64_t span = g.range_span(c, ri - g.coarse_begin_[c]);
      if (g.range_explicit(span)) return;
      const std::uint64_t nsub = nsub_of(ri), cnt = range_count(ri);
      std::uint64_t at = total_a + extra[ri];
      for (std::uint64_t sidx = 0; sidx < nsub; ++sidx) {
        auto [lo, hi] = sub_bounds(ri, sidx, nsub, span);
        if (!g.sub_explicit(hi - lo)) continue;
        g.pool_[g.payload_[ri] + nsub - 1 + sidx] = static_cast<std::uint32_t>(at);
        at += std::min(g.g2_, cnt - sidx * g.g2_) - 1;
      }
    });
    for_each_occurrence([&](std::uint64_t i, unsigned c, std::uint64_t t) {
      const std::uint64_t ri = g.coarse_begin_[c] + t / g.g1_;
      const std::uint64_t j = t % g.g1_;
      if (g.range_explicit(g.range_span(c, t / g.g1_))) return;
      const std::uint64_t sidx = j / g.g2_, jj = j % g.g2_;
      if (jj == 0) return;
      const std::uint64_t nsub = nsub_of(ri);
      const std::uint32_t h = g.pool_[g.payload_[ri] + nsub - 1 + sidx];
      if (h == kNoPayload) return;
      const std::uint64_t sub_lo = sidx ? g.pool_[g.payload_[ri] + sidx - 1] : 0;
      g.pool_[h + jj - 1] = static_cast<std::uint32_t>(i - g.coarse_[ri] - sub_lo);
    });
  }
  if (stats) stats->ops += ops.load();
  return g;
}

std::uint64_t GeneralRS::grank(const BitPackedArray& s, unsigned c, std::uint64_t i) const {
  if (c >= sigma_) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
  if (i >= n_ || s.size() != n_) fail(ErrorCode::kOutOfRange, "rank position out of range");
  const std::uint64_t p = i + 1;
  const std::uint64_t blk = p / block_len_;
  return super_[(p / super_len_) * sigma_ + c] + block_[blk * sigma_ + c] +
         in_block(s, blk * block_len_, p - blk * block_len_, c);
}

std::uint64_t GeneralRS::range_span(unsigned c, std::uint64_t r) const {
  const std::uint64_t ri = coarse_begin_[c] + r;
  return ri + 1 < coarse_begin_[c + 1] ? coarse_[ri + 1] - coarse_[ri] : last_[c] - coarse_[ri] + 1;
}

std::uint64_t GeneralRS::gselect(const BitPackedArray& s, unsigned c, std::uint64_t k) const {
  if (c >= sigma_) fail(ErrorCode::kSymbolOutOfRange, "symbol >= sigma");
  if (k == 0 || k > freq_[c]) fail(ErrorCode::kNoSuchOccurrence, "no such occurrence");
  const std::uint64_t t = k - 1;
  const std::uint64_t r = t / g1_, j = t % g1_;
  const std::uint64_t ri = coarse_begin_[c] + r;
  const std::uint64_t base = coarse_[ri];
  if (j == 0) return base;
  const std::uint64_t span = range_span(c, r);
  const std::uint64_t at = payload_[ri];
  if (range_explicit(span)) return base + pool_[at + j - 1];
  const std::uint64_t cnt = std::min(g1_, freq_[c] - r * g1_);
  const std::uint64_t nsub = (cnt + g2_ - 1) / g2_;
  const std::uint64_t sidx = j / g2_, jj = j % g2_;
  const std::uint64_t sub_lo = sidx ? pool_[at + sidx - 1] : 0;
  if (jj == 0) return base + sub_lo;
  const std::uint32_t h = pool_[at + nsub - 1 + sidx];
  if (h != kNoPayload) return base + sub_lo + pool_[h + jj - 1];
  // Smallest p in the sub-range with rank(c, p) == k.
  std::uint64_t lo = base + sub_lo + 1;
  std::uint64_t hi = base + (sidx + 1 < nsub ? pool_[at + sidx] : span);
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (rank(s, c, mid) >= k) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

GeneralRS::SelectShape GeneralRS::select_shape() const {
  SelectShape sh;
  for (unsigned c = 0; c < sigma_; ++c) {
    for (std::uint64_t ri = coarse_begin_[c]; ri < coarse_begin_[c + 1]; ++ri) {
      const std::uint64_t r = ri - coarse_begin_[c];
      if (range_explicit(range_span(c, r))) {
        ++sh.explicit_ranges;
        continue;
      }
      ++sh.two_level_ranges;
      const std::uint64_t cnt = std::min(g1_, freq_[c] - r * g1_);
      const std::uint64_t nsub = (cnt + g2_ - 1) / g2_;
      for (std::uint64_t sidx = 0; sidx < nsub; ++sidx) {
        if (pool_[payload_[ri] + nsub - 1 + sidx] != kNoPayload) ++sh.explicit_subranges;
        else ++sh.searched_subranges;
      }
    }
  }
  return sh;
}

std::size_t GeneralRS::size_in_bits() const {
  return 64 * (super_.size() + freq_.size() + last_.size() + coarse_begin_.size() + coarse_.size() +
               payload_.size()) +
         32 * (block_.size() + pool_.size()) + 8 * table_.size();
}

GeneralRS::Parts GeneralRS::parts() const {
  return {n_, sigma_, super_, block_, freq_, last_, coarse_begin_, coarse_, payload_, pool_};
}

GeneralRS GeneralRS::from_parts(Parts p) {
  if (p.sigma == 0 || p.sigma > kMaxSigma) fail(ErrorCode::kFormat, "general rank/select sigma out of range");
  GeneralRS g;
  g.n_ = p.n;
  g.sigma_ = p.sigma;
  g.init_params();
  const std::uint64_t sg = p.sigma;
  if (p.super.size() != (p.n / g.super_len_ + 1) * sg || p.block.size() != (p.n / g.block_len_ + 1) * sg ||
      p.freq.size() != sg || p.last.size() != sg || p.coarse_begin.size() != sg + 1 ||
      p.coarse.size() != p.coarse_begin.back() || p.payload.size() != p.coarse.size()) {
    fail(ErrorCode::kFormat, "general rank/select shape mismatch");
  }
  for (auto off : p.payload) {
    if (off > p.pool.size()) fail(ErrorCode::kFormat, "general rank/select payload offset out of range");
  }
  g.build_table();
  g.super_ = std::move(p.super);
  g.block_ = std::move(p.block);
  g.freq_ = std::move(p.freq);
  g.last_ = std::move(p.last);
  g.coarse_begin_ = std::move(p.coarse_begin);
  g.coarse_ = std::move(p.coarse);
  g.payload_ = std::move(p.payload);
  g.pool_ = std::move(p.pool);
  return g;
}

}  // namespace pwt
