#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pwt/general_rank_select.hpp"
#include "test_helpers.hpp"

using namespace pwt;

namespace {

struct Built {
  BitPackedArray seq;
  GeneralRS rs;
};

Built make(const std::vector<std::uint32_t>& s, unsigned sigma, GeneralStats* st = nullptr) {
  Built b{pack_symbols(s, sigma), {}};
  b.rs = GeneralRS::build(b.seq, sigma, st);
  return b;
}

void check_samples(const Built& b, const std::vector<std::uint32_t>& s, unsigned sigma) {
  // cumulative counts <= c before position p
  auto before = [&](std::uint64_t p, unsigned c) {
    std::uint64_t r = 0;
    for (std::uint64_t i = 0; i < p; ++i) r += s[i] <= c;
    return r;
  };
  const auto& g = b.rs;
  for (std::size_t k = 0; k < g.num_super(); ++k) {
    for (unsigned c = 0; c < sigma; ++c) REQUIRE(g.super_entry(k, c) == before(k * g.super_len(), c));
  }
  // incremental check of every block entry
  std::vector<std::uint64_t> run(sigma, 0);
  std::uint64_t pos = 0;
  for (std::size_t j = 0; j < g.num_blocks(); ++j) {
    const std::uint64_t p = j * g.block_len();
    for (; pos < p; ++pos) {
      for (unsigned c = s[pos]; c < sigma; ++c) ++run[c];
    }
    const std::uint64_t sup = p / g.super_len();
    for (unsigned c = 0; c < sigma; ++c) REQUIRE(g.block_entry(j, c) + g.super_entry(sup, c) == run[c]);
  }
}

void check_queries(const Built& b, const std::vector<std::uint32_t>& s, unsigned sigma, int probes,
                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = s.size();
  for (int q = 0; q < probes && n; ++q) {
    const std::size_t i = rng() % n;
    const unsigned c = static_cast<unsigned>(rng() % sigma);
    REQUIRE(b.rs.grank(b.seq, c, i) == oracle::rank_leq(s, c, i));
    const std::size_t r = oracle::rank_sym(s, c, i);
    REQUIRE(b.rs.rank(b.seq, c, i) == r);
    if (r) {
      const auto p = b.rs.gselect(b.seq, c, r);
      REQUIRE(p <= i);
      REQUIRE(b.rs.rank(b.seq, c, p) == r);
    }
  }
}

void check_all_selects(const Built& b, const std::vector<std::uint32_t>& s, unsigned sigma) {
  std::vector<std::uint64_t> seen(sigma, 0);
  for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(b.rs.gselect(b.seq, s[i], ++seen[s[i]]) == i);
  for (unsigned c = 0; c < sigma; ++c) {
    REQUIRE(b.rs.frequency(c) == seen[c]);
    REQUIRE_THROWS_AS(b.rs.gselect(b.seq, c, seen[c] + 1), Error);
  }
}

}  // namespace

TEST_CASE("small example") {
  std::vector<std::uint32_t> s{2, 0, 1, 2};
  auto b = make(s, 3);
  CHECK(b.rs.grank(b.seq, 1, 2) == 2);
  CHECK(b.rs.grank(b.seq, 0, 3) == 1);
  for (std::uint64_t i = 0; i < 4; ++i) CHECK(b.rs.grank(b.seq, 2, i) == i + 1);
  CHECK(b.rs.gselect(b.seq, 2, 2) == 3);
  CHECK(b.rs.gselect(b.seq, 2, 1) == 0);
  CHECK_THROWS_AS(b.rs.gselect(b.seq, 2, 3), Error);
  CHECK_THROWS_AS(b.rs.grank(b.seq, 3, 0), Error);
  CHECK_THROWS_AS(b.rs.grank(b.seq, 0, 4), Error);
}

TEST_CASE("constant sequence and absent characters") {
  std::vector<std::uint32_t> s(5000, 0);
  auto b = make(s, 4);
  check_samples(b, s, 4);
  for (std::uint64_t k = 1; k <= s.size(); k += 37) CHECK(b.rs.gselect(b.seq, 0, k) == k - 1);
  for (unsigned c = 1; c < 4; ++c) {
    CHECK(b.rs.frequency(c) == 0);
    CHECK_THROWS_AS(b.rs.gselect(b.seq, c, 1), Error);
  }
  for (std::uint64_t i = 0; i < s.size(); i += 101) {
    for (unsigned c = 0; c < 4; ++c) CHECK(b.rs.grank(b.seq, c, i) == i + 1);
  }
}

TEST_CASE("empty sequence and argument checks") {
  std::vector<std::uint32_t> s;
  auto b = make(s, 16);
  CHECK(b.rs.size() == 0);
  CHECK_THROWS_AS(b.rs.gselect(b.seq, 0, 1), Error);
  BitPackedArray wrong(10, 3);
  CHECK_THROWS_AS(GeneralRS::build(wrong, 16, nullptr), Error);
  BitPackedArray big(10, 9);
  CHECK_THROWS_AS(GeneralRS::build(big, 257, nullptr), Error);
  std::vector<std::uint32_t> bad{0, 5};
  CHECK_THROWS_AS(pack_symbols(bad, 5), Error);
}

TEST_CASE("random sequences match scan oracles") {
  for (unsigned sigma : {1u, 2u, 3u, 16u, 256u}) {
    CAPTURE(sigma);
    auto s = oracle::random_sequence(100000, sigma, sigma + 100);
    auto b = make(s, sigma);
    check_samples(b, s, sigma);
    check_queries(b, s, sigma, 10000, sigma);
    check_all_selects(b, s, sigma);
    CHECK(b.rs.grank(b.seq, sigma - 1, s.size() - 1) == s.size());
  }
}

TEST_CASE("table and scan paths agree") {
  auto s = oracle::random_sequence(20000, 2, 5);
  auto b = make(s, 2);
  CHECK(b.rs.uses_table());
  auto s16 = oracle::random_sequence(20000, 16, 5);
  auto b16 = make(s16, 16);
  CHECK_FALSE(b16.rs.uses_table());
  check_queries(b, s, 2, 5000, 1);
  check_queries(b16, s16, 16, 5000, 2);
}

TEST_CASE("grank is monotone in c and i") {
  auto s = oracle::random_sequence(30000, 16, 9);
  auto b = make(s, 16);
  std::mt19937_64 rng(3);
  for (int q = 0; q < 2000; ++q) {
    const std::uint64_t i = rng() % (s.size() - 1);
    const unsigned c = static_cast<unsigned>(rng() % 15);
    REQUIRE(b.rs.grank(b.seq, c, i) <= b.rs.grank(b.seq, c + 1, i));
    REQUIRE(b.rs.grank(b.seq, c, i) <= b.rs.grank(b.seq, c, i + 1));
  }
}

TEST_CASE("every select range kind") {
  // Character 1 is very sparse first (explicit ranges), then moderately
  // sparse (stored sub-ranges), then dense (searched sub-ranges).
  std::vector<std::uint32_t> s;
  std::mt19937_64 rng(11);
  auto emit = [&](std::size_t ones, std::size_t gap) {
    for (std::size_t k = 0; k < ones; ++k) {
      for (std::size_t g = 0; g < gap; ++g) s.push_back(0);
      s.push_back(1);
    }
  };
  emit(1700, 1000);
  emit(2000, 200);
  emit(3000, 1);
  auto b = make(s, 2);
  auto sh = b.rs.select_shape();
  CHECK(sh.explicit_ranges > 0);
  CHECK(sh.two_level_ranges > 0);
  CHECK(sh.explicit_subranges > 0);
  CHECK(sh.searched_subranges > 0);
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 1) REQUIRE(b.rs.gselect(b.seq, 1, ++k) == i);
  }
  for (std::uint64_t z = 1; z <= b.rs.frequency(0); z += 997) {
    REQUIRE(b.rs.gselect(b.seq, 0, z) == *oracle::select_sym(s, 0, z));
  }
}

TEST_CASE("construction work is linear") {
  for (unsigned sigma : {2u, 16u, 256u}) {
    CAPTURE(sigma);
    auto s = oracle::random_sequence(200000, sigma, 1);
    GeneralStats st;
    make(s, sigma, &st);
    // a handful of passes over the symbols plus o(n) for the directories
    CHECK(st.ops <= 16 * s.size());
    GeneralStats st2;
    auto s2 = oracle::random_sequence(400000, sigma, 1);
    make(s2, sigma, &st2);
    CHECK(double(st2.ops) / double(st.ops) < 2.2);
  }
}

TEST_CASE("deterministic across thread counts and parts round trip") {
  auto s = oracle::random_sequence(100000, 16, 8);
  auto ref = make(s, 16);
  for (int threads : {1, 2, 8}) {
    ThreadScope scope(threads, 256);
    CHECK(make(s, 16).rs == ref.rs);
  }
  CHECK(GeneralRS::from_parts(ref.rs.parts()) == ref.rs);
  auto p = ref.rs.parts();
  p.block.pop_back();
  CHECK_THROWS_AS(GeneralRS::from_parts(p), Error);
}
