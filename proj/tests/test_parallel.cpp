#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pwt/parallel.hpp"
#include "test_helpers.hpp"

using namespace pwt::parallel;

namespace {
std::vector<std::uint64_t> random_values(std::size_t n, std::uint64_t hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> d(0, hi);
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}
}  // namespace

TEST_CASE("prefix_sum small cases") {
  std::vector<std::uint64_t> x{1, 0, 1, 1};
  auto [off, total] = prefix_sum(std::span<const std::uint64_t>(x));
  CHECK(off == std::vector<std::uint64_t>{0, 1, 1, 2});
  CHECK(total == 3);
  CHECK(x == std::vector<std::uint64_t>{1, 0, 1, 1});

  std::vector<std::uint64_t> empty;
  auto [e, t] = prefix_sum(std::span<const std::uint64_t>(empty));
  CHECK(e.empty());
  CHECK(t == 0);
}

TEST_CASE("prefix_sum matches a sequential fold for every thread count") {
  auto x = random_values(100000, 7, 11);
  std::uint64_t expect_total = 0;
  auto expect = oracle::exclusive_scan(x, &expect_total);
  for (int threads : {1, 2, 8}) {
    ThreadScope scope(threads, 512);
    auto [off, total] = prefix_sum(std::span<const std::uint64_t>(x));
    CHECK(off == expect);
    CHECK(total == expect_total);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) REQUIRE(off[i + 1] - off[i] == x[i]);
    CHECK(total == off.back() + x.back());
  }
}

TEST_CASE("prefix_sum reports overflow") {
  std::vector<std::uint64_t> x{~std::uint64_t{0}, 2};
  CHECK_THROWS_AS(prefix_sum(std::span<const std::uint64_t>(x)), pwt::Error);
  std::vector<std::uint64_t> big(20000, std::uint64_t{1} << 62);
  ThreadScope scope(4, 256);
  try {
    prefix_sum(std::span<const std::uint64_t>(big));
    FAIL("expected overflow");
  } catch (const pwt::Error& e) {
    CHECK(e.code() == pwt::ErrorCode::kOverflow);
  }
}

TEST_CASE("filter keeps order") {
  std::vector<std::uint64_t> x{5, 2, 7, 2};
  CHECK(filter(std::span<const std::uint64_t>(x), [](auto v) { return v != 2; }) ==
        std::vector<std::uint64_t>{5, 7});
  CHECK(filter(std::span<const std::uint64_t>(x), [](auto) { return false; }).empty());

  auto big = random_values(100000, 1000, 3);
  std::vector<std::uint64_t> expect;
  for (auto v : big) {
    if (v % 2 == 0) expect.push_back(v);
  }
  for (int threads : {1, 2, 8}) {
    ThreadScope scope(threads, 1000);
    auto even = [](std::uint64_t v) { return v % 2 == 0; };
    CHECK(filter(std::span<const std::uint64_t>(big), even) == expect);
    // filter(p) then filter(q) == filter(p && q)
    auto small = [](std::uint64_t v) { return v < 300; };
    auto a = filter(std::span<const std::uint64_t>(big), even);
    auto twice = filter(std::span<const std::uint64_t>(a), small);
    auto once = filter(std::span<const std::uint64_t>(big), [&](auto v) { return even(v) && small(v); });
    CHECK(twice == once);
  }
}

TEST_CASE("stable_sort_by_bits") {
  std::vector<std::uint32_t> x{3, 1, 3, 0};
  CHECK(stable_sort_by_bits(std::span<const std::uint32_t>(x), 2, 0, 1) == std::vector<std::uint32_t>{1, 0, 3, 3});
  CHECK(stable_sort_by_bits(std::span<const std::uint32_t>(x), 2, 0, 0) == x);
  CHECK_THROWS_AS(stable_sort_by_bits(std::span<const std::uint32_t>(x), 2, 1, 2), pwt::Error);
}

TEST_CASE("stable_sort_by_bits equals std::stable_sort and preserves tagged order") {
  // Symbols carry their original index in the low 32 bits; keys use only
  // the symbol part, so stability is observable.
  std::mt19937_64 rng(5);
  std::vector<std::uint64_t> x(100000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = ((rng() & 0xffff) << 32) | i;
  auto key = [](std::uint64_t v) { return (v >> 40) & 0xff; };  // top 8 of the 16 symbol bits
  auto expect = x;
  std::stable_sort(expect.begin(), expect.end(), [&](auto a, auto b) { return key(a) < key(b); });
  for (int threads : {1, 2, 8}) {
    ThreadScope scope(threads, 2048);
    // width 48: the symbol occupies bits [32, 48), its top 8 bits are [0, 8).
    auto got = stable_sort_by_bits(std::span<const std::uint64_t>(x), 48, 0, 8);
    CHECK(got == expect);
    auto multi = stable_sort_by_bits(std::span<const std::uint64_t>(x), 48, 0, 16);
    auto expect16 = x;
    std::stable_sort(expect16.begin(), expect16.end(), [](auto a, auto b) { return (a >> 32) < (b >> 32); });
    CHECK(multi == expect16);
  }
}

TEST_CASE("segmented sort only reorders inside segments") {
  std::vector<std::uint32_t> x{3, 1, 2, 0, 3, 1, 0};
  std::vector<std::uint64_t> bounds{0, 3, 7};
  std::vector<std::uint32_t> out(x.size());
  segmented_stable_sort_into(std::span<const std::uint32_t>(x), std::span<std::uint32_t>(out),
                             std::span<const std::uint64_t>(bounds), 1, [](std::uint32_t v) { return v & 1; });
  CHECK(out == std::vector<std::uint32_t>{2, 3, 1, 0, 0, 3, 1});
}

TEST_CASE("stable partition") {
  std::vector<std::uint32_t> x{3, 0, 1, 2, 1, 0};
  std::vector<std::uint32_t> out(6);
  auto zeros = stable_partition_into(std::span<const std::uint32_t>(x), std::span<std::uint32_t>(out),
                                     [](std::uint32_t v) { return (v & 2) != 0; });
  CHECK(zeros == 4);
  CHECK(out == std::vector<std::uint32_t>{0, 1, 1, 0, 3, 2});
}
