#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pwt/packed_wt.hpp"
#include "test_helpers.hpp"

using namespace pwt;

namespace {

const std::vector<Symbol> kDemo{3, 0, 1, 2, 1, 0};

std::vector<std::uint64_t> random_values(std::size_t n, unsigned b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = rng() & ((std::uint64_t{1} << b) - 1);
  return v;
}

// Node bitmaps of the packed build against slices of the level bitmaps.
void check_equivalent(const PackedTree& p, const WaveletTree& w) {
  REQUIRE(p.per_level.size() == w.num_levels());
  std::size_t count = 0;
  for (unsigned l = 0; l < w.num_levels(); ++l) {
    for (const auto& [id, bm] : p.per_level[l]) {
      const NodeEntry* e = w.nodes().find(id);
      REQUIRE(e != nullptr);
      REQUIRE(node_level(id) == l);
      REQUIRE(e->len == bm.size());
      for (std::uint64_t i = 0; i < e->len; ++i) REQUIRE(bm.get(i) == w.level_bits(l).get(e->start + i));
      ++count;
    }
  }
  REQUIRE(count == w.nodes().size());
}

// Brute-force split of a block of tau-bit elements by bit t.
void check_entry(const SplitTable& table, unsigned m, std::uint64_t pattern, unsigned t) {
  const unsigned tau = table.tau();
  std::vector<std::uint64_t> elems(m), zeros, ones;
  std::vector<bool> bits(m);
  for (unsigned i = 0; i < m; ++i) {
    elems[i] = (pattern >> (i * tau)) & ((std::uint64_t{1} << tau) - 1);
    bits[i] = (elems[i] >> (tau - 1 - t)) & 1u;
    (bits[i] ? ones : zeros).push_back(elems[i]);
  }
  const SplitEntry& e = table.lookup(m, pattern, t);
  for (unsigned i = 0; i < m; ++i) REQUIRE(((e.bitmap >> i) & 1u) == bits[i]);
  REQUIRE((e.bitmap >> m) == 0);
  std::vector<std::uint64_t> got(m);
  for (unsigned i = 0; i < m; ++i) got[i] = (std::uint64_t{e.parts} >> (i * tau)) & ((std::uint64_t{1} << tau) - 1);
  std::vector<std::uint64_t> want = zeros;
  want.insert(want.end(), ones.begin(), ones.end());
  REQUIRE(got == want);
}

}  // namespace

TEST_CASE("packed list append") {
  PackedList a(3);
  a.push_back(5);
  a.push_back(1);
  PackedList c(3);
  c.push_back(7);
  auto r = packed_append(a, c);
  CHECK(r.values() == std::vector<std::uint64_t>{5, 1, 7});
  CHECK(packed_append(PackedList(3), c) == c);
  CHECK(packed_append(c, PackedList(3)) == c);
  CHECK_THROWS_AS(packed_append(a, PackedList(4)), Error);
  CHECK_THROWS_AS(a.push_back(8), Error);
  CHECK_THROWS_AS(PackedList(0), Error);
  CHECK_THROWS_AS(PackedList(33), Error);
}

TEST_CASE("packed list append matches unpacked concatenation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const unsigned b = 1 + rng() % 32;
    PackedList acc(b);
    std::vector<std::uint64_t> ref;
    for (int piece = 0; piece < 6; ++piece) {
      auto v = random_values(rng() % 150, b, rng());
      acc.append(PackedList::from_values(b, v));
      ref.insert(ref.end(), v.begin(), v.end());
      REQUIRE(acc.size() == ref.size());
    }
    REQUIRE(acc.values() == ref);
    // Trailing bits stay zero.
    const std::size_t used = ref.size() * b;
    if (used % 64) REQUIRE((acc.words().back() >> (used % 64)) == 0);
    REQUIRE(acc == PackedList::from_values(b, ref));
  }
}

TEST_CASE("packed list split") {
  CHECK(PackedList(4).split(3).empty());
  std::vector<std::uint64_t> five{1, 2, 3, 4, 5};
  auto parts = PackedList::from_values(3, five).split(2);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].size() == 2);
  CHECK(parts[1].size() == 2);
  CHECK(parts[2].size() == 1);
  CHECK(parts[2].values() == std::vector<std::uint64_t>{5});
  CHECK_THROWS_AS(PackedList(3).split(0), Error);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned b = 1 + rng() % 32;
    auto v = random_values(rng() % 2000, b, rng());
    auto p = PackedList::from_values(b, v);
    const std::size_t k = 1 + rng() % 100;
    auto chunks = p.split(k);
    PackedList back(b);
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      REQUIRE(chunks[c].size() == (c + 1 < chunks.size() ? k : v.size() - c * k));
      back.append(chunks[c]);
    }
    REQUIRE(back == p);
  }
}

TEST_CASE("split table: worked entry") {
  auto t = SplitTable::build(2, 3);
  const std::uint64_t pattern = 0b10 | (0b01 << 2) | (0b11 << 4);
  const SplitEntry& e = t.lookup(3, pattern, 0);
  CHECK(e.bitmap == 0b101);
  // L0 = [01], L1 = [10, 11].
  CHECK((e.parts & 0b11) == 0b01);
  CHECK(((e.parts >> 2) & 0b11) == 0b10);
  CHECK(((e.parts >> 4) & 0b11) == 0b11);
  check_entry(t, 3, pattern, 0);

  // Identical elements go all to one side.
  const std::uint64_t same = 0b10 | (0b10 << 2);
  CHECK(t.lookup(2, same, 0).bitmap == 0b11);
  CHECK(t.lookup(2, same, 1).bitmap == 0);
}

TEST_CASE("split table: exhaustive for tau 2 and 3") {
  for (unsigned tau : {2u, 3u}) {
    auto t = SplitTable::build(tau, 3);
    REQUIRE(t.size() == SplitTable::entries_for(tau, 3));
    for (unsigned m = 1; m <= 3; ++m) {
      for (std::uint64_t p = 0; p < (std::uint64_t{1} << (m * tau)); ++p) {
        for (unsigned bit = 0; bit < tau; ++bit) check_entry(t, m, p, bit);
      }
    }
  }
}

TEST_CASE("split table: parameters") {
  CHECK(SplitTable::tau_for(1 << 16) == 4);
  CHECK(SplitTable::tau_for(1 << 20) == 4);
  CHECK(SplitTable::tau_for(1 << 25) == 5);
  CHECK(SplitTable::tau_for(0) == 1);
  CHECK(SplitTable::tau_for(3) == 1);
  CHECK(SplitTable::block_for(4, 1 << 16) == 2);
  CHECK(SplitTable::block_for(1, 2) == 1);
  CHECK(SplitTable::block_for(1, std::uint64_t{1} << 60) <= 24);
  CHECK(SplitTable::entries_for(1, SplitTable::block_for(1, std::uint64_t{1} << 60)) <= SplitTable::kMaxEntries);
  CHECK_THROWS_AS(SplitTable::build(0, 1), Error);
  CHECK_THROWS_AS(SplitTable::build(4, 9), Error);
  CHECK_THROWS_AS(SplitTable::build(1, 30), Error);
}

TEST_CASE("packed build: big-node depths") {
  auto s = oracle::random_sequence(1 << 16, 1 << 16, 3);
  PackedStats st;
  auto p = build_packed(s, 1 << 16, {}, &st);
  CHECK(st.tau == 4);
  CHECK(st.big_levels == std::vector<unsigned>{0, 4, 8, 12});
  check_equivalent(p, WaveletTree::build_level(s, 1 << 16));
}

TEST_CASE("packed build: demo equals level construction") {
  auto w = WaveletTree::build_level(kDemo, 4);
  // Six symbols give tau = 1: every level is a big level.
  PackedStats st;
  auto p = build_packed(kDemo, 4, {}, &st);
  CHECK(st.tau == 1);
  CHECK(st.big_levels == std::vector<unsigned>{0, 1});
  check_equivalent(p, w);
  CHECK(to_wavelet_tree(p).same_structure(w));
  // tau = 2 covers both levels: only the root is big.
  auto q = build_packed(kDemo, 4, PackedOptions{2, 3}, &st);
  CHECK(st.big_levels == std::vector<unsigned>{0});
  CHECK(st.short_list_symbol_levels == 6);
  check_equivalent(q, w);
}

TEST_CASE("packed build: degenerate inputs") {
  CHECK(build_packed(std::vector<Symbol>{}, 1).per_level.empty());
  auto e = build_packed(std::vector<Symbol>{}, 10);
  REQUIRE(e.per_level.size() == 4);
  REQUIRE(e.per_level[0].size() == 1);
  CHECK(to_wavelet_tree(e).same_structure(WaveletTree::build_level(std::vector<Symbol>{}, 10)));
  std::vector<Symbol> one{0, 0, 0};
  CHECK(to_wavelet_tree(build_packed(one, 1)).same_structure(WaveletTree::build_level(one, 1)));
  CHECK_THROWS_AS(build_packed(std::vector<Symbol>{4}, 4), Error);
}

TEST_CASE("packed build: random inputs and forced parameters") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const std::uint64_t sigma = 1 + rng() % 3000;
    const std::size_t n = rng() % 3000;
    auto s = oracle::random_sequence(n, sigma, rng());
    PackedOptions opt;
    if (trial % 2) {
      opt.tau = 1 + rng() % 6;
      opt.block = 1 + rng() % (32 / opt.tau);
      if (SplitTable::entries_for(opt.tau, opt.block) > SplitTable::kMaxEntries) opt.block = 1;
    }
    auto p = build_packed(s, sigma, opt);
    auto w = WaveletTree::build_level(s, sigma);
    check_equivalent(p, w);
    REQUIRE(to_wavelet_tree(p).same_structure(w));
  }
}

TEST_CASE("packed build: large random sequence") {
  auto s = oracle::random_sequence(100000, 1 << 16, 77);
  auto w = WaveletTree::build_level(s, 1 << 16);
  auto p = build_packed(s, 1 << 16);
  check_equivalent(p, w);
  auto t = to_wavelet_tree(p);
  REQUIRE(t.same_structure(w));
  std::mt19937_64 rng(1);
  for (int q = 0; q < 500; ++q) {
    const std::size_t i = rng() % s.size();
    REQUIRE(t.access(i) == s[i]);
  }
}

TEST_CASE("packed build: deterministic across thread counts") {
  auto s = oracle::random_sequence(200000, 5000, 4);
  ThreadScope base(1);
  auto ref = build_packed_wt(s, 5000);
  for (int threads : {2, 4}) {
    ThreadScope scope(threads, 256);
    REQUIRE(build_packed_wt(s, 5000).same_structure(ref));
  }
}

TEST_CASE("packed build: short-list work per symbol-level") {
  auto s = oracle::random_sequence(1 << 18, 1 << 16, 6);
  PackedStats st;
  build_packed(s, 1 << 16, {}, &st);
  REQUIRE(st.short_list_symbol_levels > 0);
  // Three of every four levels use short lists.
  CHECK(st.short_list_symbol_levels == std::uint64_t{3} * 4 * s.size());
  const double per = double(st.short_list_ops) / double(st.short_list_symbol_levels);
  // Word operations per symbol shrink with the block length.
  CHECK(per < 8.0);
  MESSAGE("short-list ops per symbol-level: " << per);
}
