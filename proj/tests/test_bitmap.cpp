#include <random>
#include <thread>

#include "doctest.h"
#include "oracles.hpp"
#include "pwt/bitmap.hpp"
#include "test_helpers.hpp"

using pwt::Bitmap;

namespace {
std::vector<std::uint8_t> as_bytes(const std::vector<bool>& v) { return {v.begin(), v.end()}; }
}  // namespace

TEST_CASE("new bitmap sizes") {
  CHECK(Bitmap(0).num_words() == 0);
  CHECK(Bitmap(64).num_words() == 1);
  Bitmap b(65);
  CHECK(b.num_words() == 2);
  for (std::size_t i = 0; i < 65; ++i) REQUIRE_FALSE(b.get(i));
  CHECK_THROWS_AS(b.at(65), pwt::Error);
}

TEST_CASE("write_region layout") {
  Bitmap b(3);
  std::vector<std::uint8_t> bits{1, 0, 1};
  b.write_region(0, bits);
  CHECK(b.words()[0] == 0b101);

  Bitmap c(128);
  std::vector<std::uint8_t> three{1, 1, 1};
  c.write_region(62, three);
  CHECK(c.words()[0] == (std::uint64_t{3} << 62));
  CHECK(c.words()[1] == 1);
  // idempotent
  c.write_region(62, three);
  CHECK(c.words()[1] == 1);
  CHECK_THROWS_AS(c.write_region(127, three), pwt::Error);
}

TEST_CASE("concurrent writers on one word") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<std::uint8_t> a(32), b(32);
    for (auto& x : a) x = rng() & 1;
    for (auto& x : b) x = rng() & 1;
    Bitmap bm(64);
    std::thread t1([&] { bm.write_region(0, a); });
    std::thread t2([&] { bm.write_region(32, b); });
    t1.join();
    t2.join();
    std::uint64_t expect = 0;
    for (int i = 0; i < 32; ++i) {
      expect |= std::uint64_t{a[i]} << i;
      expect |= std::uint64_t{b[i]} << (32 + i);
    }
    REQUIRE(bm.words()[0] == expect);
  }
}

TEST_CASE("many disjoint regions written in parallel") {
  ThreadScope scope(8, 64);
  auto bits = oracle::random_bits(200000, 0.5, 9);
  Bitmap bm(bits.size());
  // Regions of uneven sizes so boundary words are shared.
  std::vector<std::size_t> cuts{0};
  std::mt19937_64 rng(2);
  while (cuts.back() < bits.size()) cuts.push_back(std::min(bits.size(), cuts.back() + 1 + rng() % 150));
  auto bytes = as_bytes(bits);
  pwt::parallel::parallel_for(0, cuts.size() - 1, [&](std::size_t r) {
    bm.write_region(cuts[r], std::span<const std::uint8_t>(bytes).subspan(cuts[r], cuts[r + 1] - cuts[r]));
  }, 2);
  for (std::size_t i = 0; i < bits.size(); ++i) REQUIRE(bm.get(i) == bits[i]);
}

TEST_CASE("random write/read fuzz against a shadow array") {
  const std::size_t n = 5000;
  Bitmap bm(n);
  std::vector<bool> shadow(n, false);
  std::mt19937_64 rng(3);
  for (int op = 0; op < 100000; ++op) {
    if (rng() % 2) {
      std::size_t start = rng() % n;
      std::size_t len = rng() % std::min<std::size_t>(200, n - start + 1);
      std::vector<std::uint8_t> bits(len);
      for (auto& x : bits) x = rng() & 1;
      if (op % 3) bm.write_region(start, bits);
      else bm.write_region_run_optimized(start, bits);
      for (std::size_t k = 0; k < len; ++k) shadow[start + k] = bits[k];
    } else {
      std::size_t i = rng() % n;
      REQUIRE(bm.get(i) == shadow[i]);
    }
  }
  // tail bits stay zero
  CHECK((bm.words().back() >> (n % 64)) == 0);
}

TEST_CASE("run-optimized writer matches the plain writer") {
  Bitmap ones(64);
  std::vector<std::uint8_t> all(64, 1);
  ones.write_region_run_optimized(0, all);
  CHECK(ones.words()[0] == ~std::uint64_t{0});

  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 10000; ++rep) {
    std::size_t n = 1 + rng() % 300;
    std::size_t start = rng() % n;
    std::size_t len = rng() % (n - start + 1);
    std::vector<std::uint8_t> bits(len);
    const bool runs = rep % 2;
    std::uint8_t cur = 0;
    for (std::size_t k = 0; k < len; ++k) {
      if (runs) {
        if (rng() % 16 == 0) cur ^= 1;
        bits[k] = cur;
      } else {
        bits[k] = k % 2;
      }
    }
    Bitmap a(n), b(n);
    pwt::WriteStats sa, sb;
    a.write_region(start, bits, &sa);
    b.write_region_run_optimized(start, bits, &sb);
    REQUIRE(a == b);
    REQUIRE(sa.word_stores == sb.word_stores);
    REQUIRE(sb.set_ops <= sa.set_ops);
  }
}

TEST_CASE("bit packed array") {
  std::vector<std::uint64_t> v{5, 1, 7, 0, 3};
  auto a = pwt::BitPackedArray::from_values(v);
  CHECK(a.width() == 3);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(a[i] == v[i]);
  pwt::BitPackedArray wide(3, 64);
  wide.set_atomic(1, ~std::uint64_t{0});
  CHECK(wide[0] == 0);
  CHECK(wide[1] == ~std::uint64_t{0});
  CHECK(wide[2] == 0);
  CHECK_THROWS_AS(pwt::BitPackedArray(1, 65), pwt::Error);
}
