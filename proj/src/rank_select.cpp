#include "pwt/rank_select.hpp"

#include <array>
#include <bit>

#include "pwt/parallel.hpp"

namespace pwt {

namespace {

constexpr unsigned ceil_log2(std::uint64_t v) { return v <= 1 ? 0 : bit_width_of(v - 1); }

// kSelectInByte[b][j] = position of the j'th set bit of byte b (8 if absent).
constexpr auto make_select_table() {
  std::array<std::array<std::uint8_t, 8>, 256> t{};
  for (unsigned b = 0; b < 256; ++b) {
    unsigned j = 0;
    for (auto& e : t[b]) e = 8;
    for (unsigned p = 0; p < 8; ++p) {
      if (b & (1u << p)) t[b][j++] = static_cast<std::uint8_t>(p);
    }
  }
  return t;
}
constexpr auto kSelectInByte = make_select_table();
constexpr std::size_t kSelectTableBits = 256 * 8 * 8;

// Largest popcount table key; wider spans use several lookups.
constexpr unsigned kMaxTableBits = 16;

}  // namespace

unsigned log_param(std::size_t n) { return std::max(8u, ceil_log2(n)); }

unsigned loglog_param(std::size_t n) { return std::max(2u, ceil_log2(log_param(n))); }

unsigned select_in_word(std::uint64_t x, unsigned j) {
  unsigned base = 0;
  for (;;) {
    const unsigned byte = static_cast<unsigned>(x & 0xff);
    const unsigned c = static_cast<unsigned>(std::popcount(byte));
    if (j < c) return base + kSelectInByte[byte][j];
    j -= c;
    x >>= 8;
    base += 8;
  }
}

// ---------------------------------------------------------------------------
// Rank

RankDirectory RankDirectory::build(const Bitmap& b) {
  RankDirectory d;
  const std::size_t n = b.size();
  const unsigned L = log_param(n);
  d.nbits_ = n;
  d.block_stride_ = L;
  d.super_stride_ = std::size_t{L} * L;

  // Ones before every block boundary j * L, j in [0, n / L].
  const std::size_t nblocks = n / L + 1;
  std::vector<std::uint64_t> counts(nblocks, 0);
  parallel::parallel_for(0, nblocks - 1, [&](std::size_t j) {
    counts[j] = static_cast<std::uint64_t>(std::popcount(b.read_bits(j * L, L)));
  });
  parallel::exclusive_scan_inplace(std::span<std::uint64_t>(counts));

  const std::size_t nsuper = n / d.super_stride_ + 1;
  d.super_ = BitPackedArray(nsuper, bit_width_of(n));
  parallel::parallel_for(0, nsuper, [&](std::size_t k) { d.super_.set_atomic(k, counts[k * L]); });

  // Blocks that open a super block always hold 0 and are not stored.
  const std::size_t stored = nblocks - ((nblocks - 1) / L + 1);
  d.block_ = BitPackedArray(stored, bit_width_of(d.super_stride_ - L));
  parallel::parallel_for(0, nblocks, [&](std::size_t j) {
    if (j % L == 0) return;
    d.block_.set_atomic(j - j / L - 1, counts[j] - counts[(j / L) * L]);
  });

  d.table_bits_ = std::min(kMaxTableBits, (L + 1) / 2);
  const std::size_t patterns = std::size_t{1} << d.table_bits_;
  d.table_ = BitPackedArray(patterns, bit_width_of(d.table_bits_));
  parallel::parallel_for(0, patterns, [&](std::size_t p) {
    // Count bit by bit; the table must not depend on the popcount path.
    std::uint64_t c = 0;
    for (unsigned k = 0; k < d.table_bits_; ++k) c += (p >> k) & 1u;
    d.table_.set_atomic(p, c);
  });

  d.ones_ = b.count_ones();
  return d;
}

std::size_t RankDirectory::rank1(const Bitmap& b, std::size_t i) const {
  if (i >= nbits_ || b.size() != nbits_) fail(ErrorCode::kOutOfRange, "rank position out of range");
  return ones_before(b, i + 1);
}

std::size_t RankDirectory::ones_before_table(const Bitmap& b, std::size_t p) const {
  const std::size_t j = p / block_stride_;
  std::size_t r = super_[p / super_stride_] + block_entry(j);
  std::size_t pos = j * block_stride_;
  while (pos < p) {
    const unsigned len = static_cast<unsigned>(std::min<std::size_t>(table_bits_, p - pos));
    r += table_[b.read_bits(pos, len)];
    pos += len;
  }
  return r;
}

std::size_t RankDirectory::size_in_bits() const {
  return super_.size_in_bits() + block_.size_in_bits() + table_.size_in_bits();
}

RankDirectory RankDirectory::from_parts(Parts p) {
  RankDirectory d;
  const unsigned L = log_param(p.nbits);
  d.nbits_ = p.nbits;
  d.ones_ = p.ones;
  d.block_stride_ = L;
  d.super_stride_ = std::size_t{L} * L;
  d.table_bits_ = std::min(kMaxTableBits, (L + 1) / 2);
  const std::size_t nblocks = p.nbits / L + 1;
  if (p.super.size() != p.nbits / d.super_stride_ + 1 ||
      p.block.size() != nblocks - ((nblocks - 1) / L + 1) ||
      p.table.size() != (std::size_t{1} << d.table_bits_)) {
    fail(ErrorCode::kFormat, "rank directory shape mismatch");
  }
  d.super_ = std::move(p.super);
  d.block_ = std::move(p.block);
  d.table_ = std::move(p.table);
  return d;
}

// ---------------------------------------------------------------------------
// Select

void SelectDirectory::init_params() {
  const std::size_t L = log_param(nbits_);
  ll_ = loglog_param(nbits_);
  sample_ = L * ll_;
  explicit_threshold_ = L * L * ll_ * ll_;
}

std::size_t SelectDirectory::range_span(std::size_t k) const {
  const std::size_t start = coarse_[k];
  return k + 1 < coarse_.size() ? coarse_[k + 1] - start : last_ - start + 1;
}

SelectDirectory::Kind SelectDirectory::classify_range(std::size_t span) const {
  if (span >= explicit_threshold_) return Kind::kExplicit;
  if (span <= kScanBits) return Kind::kScan;
  return Kind::kTwoLevel;
}

std::size_t SelectDirectory::sample2(std::size_t span) const {
  return std::max<std::size_t>(1, std::size_t{ceil_log2(span)} * ll_);
}

bool SelectDirectory::subrange_explicit(std::size_t sub_span, std::size_t span) const {
  if (sub_span <= kScanBits) return false;
  return sub_span >= std::size_t{ceil_log2(sub_span)} * ceil_log2(span) * ll_ * ll_;
}

SelectDirectory SelectDirectory::build(const Bitmap& b, bool target) {
  SelectDirectory d;
  d.nbits_ = b.size();
  d.target_ = target;
  d.init_params();

  const auto pos = parallel::pack_index(b.size(), [&](std::size_t i) { return b.get(i) == target; });
  const std::size_t m = pos.size();
  d.count_ = m;
  d.last_ = m ? pos.back() : 0;
  const std::size_t g1 = d.sample_;
  const std::size_t nranges = (m + g1 - 1) / g1;

  d.coarse_ = BitPackedArray(nranges, bit_width_of(d.nbits_));
  parallel::parallel_for(0, nranges, [&](std::size_t k) { d.coarse_.set_atomic(k, pos[k * g1]); });

  // Payload layout per range:
  //   explicit:  (cnt - 1) offsets from the range start, width(span) bits each
  //   scan:      nothing
  //   two-level: (nsub - 1) sub-sample offsets, width(span) bits each, then
  //              for each explicit sub-range (cnt_s - 1) offsets from the
  //              sub-sample, width(sub_span) bits each.
  auto range_count = [&](std::size_t k) { return std::min(g1, m - k * g1); };
  auto sub_span = [&](std::size_t k, std::size_t s, std::size_t g2, std::size_t nsub, std::size_t span) {
    const std::size_t base = pos[k * g1];
    const std::size_t lo = pos[k * g1 + s * g2] - base;
    const std::size_t hi = s + 1 < nsub ? pos[k * g1 + (s + 1) * g2] - base : span;
    return hi - lo;
  };
  auto payload_bits = [&](std::size_t k) -> std::uint64_t {
    const std::size_t span = d.range_span(k);
    const std::size_t cnt = range_count(k);
    switch (d.classify_range(span)) {
      case Kind::kExplicit:
        return (cnt - 1) * std::uint64_t{bit_width_of(span)};
      case Kind::kScan:
        return 0;
      case Kind::kTwoLevel: {
        const std::size_t g2 = d.sample2(span);
        const std::size_t nsub = (cnt + g2 - 1) / g2;
        std::uint64_t bits = (nsub - 1) * std::uint64_t{bit_width_of(span)};
        for (std::size_t s = 0; s < nsub; ++s) {
          const std::size_t ss = sub_span(k, s, g2, nsub, span);
          if (d.subrange_explicit(ss, span)) {
            const std::size_t cnt_s = std::min(g2, cnt - s * g2);
            bits += (cnt_s - 1) * std::uint64_t{bit_width_of(ss)};
          }
        }
        return bits;
      }
    }
    return 0;
  };

  std::vector<std::uint64_t> offs(nranges);
  parallel::parallel_for(0, nranges, [&](std::size_t k) { offs[k] = payload_bits(k); }, 64);
  const std::uint64_t total = parallel::exclusive_scan_inplace(std::span<std::uint64_t>(offs));
  d.offsets_ = BitPackedArray(nranges, bit_width_of(total));
  d.pool_ = Bitmap(total);

  parallel::parallel_for(0, nranges, [&](std::size_t k) {
    d.offsets_.set_atomic(k, offs[k]);
    const std::size_t span = d.range_span(k);
    const std::size_t cnt = range_count(k);
    const std::size_t base = pos[k * g1];
    std::uint64_t at = offs[k];
    switch (d.classify_range(span)) {
      case Kind::kExplicit: {
        const unsigned w = bit_width_of(span);
        for (std::size_t j = 1; j < cnt; ++j, at += w) d.pool_.or_bits_atomic(at, pos[k * g1 + j] - base, w);
        break;
      }
      case Kind::kScan:
        break;
      case Kind::kTwoLevel: {
        const std::size_t g2 = d.sample2(span);
        const std::size_t nsub = (cnt + g2 - 1) / g2;
        const unsigned w = bit_width_of(span);
        for (std::size_t s = 1; s < nsub; ++s, at += w) d.pool_.or_bits_atomic(at, pos[k * g1 + s * g2] - base, w);
        for (std::size_t s = 0; s < nsub; ++s) {
          const std::size_t ss = sub_span(k, s, g2, nsub, span);
          if (!d.subrange_explicit(ss, span)) continue;
          const unsigned ws = bit_width_of(ss);
          const std::size_t first = k * g1 + s * g2;
          const std::size_t cnt_s = std::min(g2, cnt - s * g2);
          for (std::size_t jj = 1; jj < cnt_s; ++jj, at += ws) {
            d.pool_.or_bits_atomic(at, pos[first + jj] - pos[first], ws);
          }
        }
        break;
      }
    }
  }, 64);
  return d;
}

std::size_t SelectDirectory::scan_from(const Bitmap& b, std::size_t pos, std::size_t jj) const {
  // jj'th target strictly after pos (jj >= 1).
  std::size_t p = pos + 1;
  std::size_t w = p / kWordBits;
  auto word_at = [&](std::size_t wi) {
    std::uint64_t x = b.words()[wi];
    if (!target_) {
      x = ~x;
      const std::size_t hi = (wi + 1) * kWordBits;
      if (hi > nbits_) x &= low_mask(static_cast<unsigned>(nbits_ - wi * kWordBits));
    }
    return x;
  };
  std::uint64_t x = word_at(w) & ~low_mask(static_cast<unsigned>(p % kWordBits));
  std::size_t need = jj - 1;  // 0-based index among targets after pos
  for (;;) {
    const std::size_t c = static_cast<std::size_t>(std::popcount(x));
    if (need < c) return w * kWordBits + select_in_word(x, static_cast<unsigned>(need));
    need -= c;
    x = word_at(++w);
  }
}

std::size_t SelectDirectory::select(const Bitmap& b, std::size_t k) const {
  if (k == 0 || k > count_) fail(ErrorCode::kNoSuchOccurrence, "no such occurrence");
  const std::size_t idx = k - 1;
  const std::size_t r = idx / sample_;
  const std::size_t j = idx % sample_;
  const std::size_t base = coarse_[r];
  if (j == 0) return base;
  const std::size_t span = range_span(r);
  const std::size_t cnt = std::min(sample_, count_ - r * sample_);
  std::uint64_t at = offsets_[r];
  switch (classify_range(span)) {
    case Kind::kExplicit: {
      const unsigned w = bit_width_of(span);
      return base + pool_.read_bits(at + (j - 1) * w, w);
    }
    case Kind::kScan:
      return scan_from(b, base, j);
    case Kind::kTwoLevel:
      break;
  }
  const std::size_t g2 = sample2(span);
  const std::size_t nsub = (cnt + g2 - 1) / g2;
  const unsigned w = bit_width_of(span);
  const std::uint64_t samples_at = at;
  auto sub_offset = [&](std::size_t s) -> std::size_t {
    if (s == 0) return 0;
    if (s >= nsub) return span;
    return pool_.read_bits(samples_at + (s - 1) * w, w);
  };
  const std::size_t s = j / g2;
  const std::size_t jj = j % g2;
  const std::size_t sub_lo = sub_offset(s);
  if (jj == 0) return base + sub_lo;
  const std::size_t ss = sub_offset(s + 1) - sub_lo;
  if (!subrange_explicit(ss, span)) return scan_from(b, base + sub_lo, jj);
  // Skip the explicit payloads of earlier sub-ranges.
  at += (nsub - 1) * w;
  std::size_t prev = 0;
  for (std::size_t t = 0; t < s; ++t) {
    const std::size_t next = sub_offset(t + 1);
    const std::size_t tspan = next - prev;
    if (subrange_explicit(tspan, span)) at += (g2 - 1) * bit_width_of(tspan);
    prev = next;
  }
  const unsigned ws = bit_width_of(ss);
  return base + sub_lo + pool_.read_bits(at + (jj - 1) * ws, ws);
}

SelectDirectory::Shape SelectDirectory::shape() const {
  Shape sh;
  for (std::size_t r = 0; r < coarse_.size(); ++r) {
    const std::size_t span = range_span(r);
    switch (classify_range(span)) {
      case Kind::kExplicit: ++sh.explicit_ranges; break;
      case Kind::kScan: ++sh.scan_ranges; break;
      case Kind::kTwoLevel: {
        ++sh.two_level_ranges;
        const std::size_t cnt = std::min(sample_, count_ - r * sample_);
        const std::size_t g2 = sample2(span);
        const std::size_t nsub = (cnt + g2 - 1) / g2;
        const unsigned w = bit_width_of(span);
        std::size_t prev = 0;
        for (std::size_t s = 0; s < nsub; ++s) {
          const std::size_t next = s + 1 < nsub ? pool_.read_bits(offsets_[r] + s * w, w) : span;
          if (subrange_explicit(next - prev, span)) ++sh.explicit_subranges;
          else ++sh.scan_subranges;
          prev = next;
        }
        break;
      }
    }
  }
  return sh;
}

std::size_t SelectDirectory::size_in_bits() const {
  return coarse_.size_in_bits() + offsets_.size_in_bits() + pool_.num_words() * kWordBits + kSelectTableBits;
}

SelectDirectory SelectDirectory::from_parts(Parts p) {
  SelectDirectory d;
  d.nbits_ = p.nbits;
  d.target_ = p.target;
  d.count_ = p.count;
  d.last_ = p.last;
  d.init_params();
  const std::size_t nranges = (p.count + d.sample_ - 1) / d.sample_;
  if (p.coarse.size() != nranges || p.offsets.size() != nranges || p.count > p.nbits ||
      (p.count && p.last >= p.nbits)) {
    fail(ErrorCode::kFormat, "select directory shape mismatch");
  }
  d.coarse_ = std::move(p.coarse);
  d.offsets_ = std::move(p.offsets);
  d.pool_ = std::move(p.pool);
  return d;
}

}  // namespace pwt
