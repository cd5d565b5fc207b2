#pragma once

// Brute-force reference implementations used only by the tests. Nothing in
// here calls into the library.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

inline std::vector<std::uint64_t> exclusive_scan(const std::vector<std::uint64_t>& x, std::uint64_t* total) {
  std::vector<std::uint64_t> out(x.size());
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = s;
    s += x[i];
  }
  *total = s;
  return out;
}

inline std::size_t rank1(const std::vector<bool>& bits, std::size_t i) {
  std::size_t c = 0;
  for (std::size_t j = 0; j <= i; ++j) c += bits[j];
  return c;
}

inline std::vector<std::size_t> positions(const std::vector<bool>& bits, bool target) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == target) out.push_back(i);
  }
  return out;
}

inline std::size_t rank_sym(const std::vector<std::uint32_t>& s, std::uint64_t c, std::size_t i) {
  std::size_t r = 0;
  for (std::size_t j = 0; j <= i; ++j) r += s[j] == c;
  return r;
}

inline std::optional<std::size_t> select_sym(const std::vector<std::uint32_t>& s, std::uint64_t c, std::size_t k) {
  std::size_t seen = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] == c && ++seen == k) return j;
  }
  return std::nullopt;
}

inline std::size_t rank_leq(const std::vector<std::uint32_t>& s, std::uint64_t c, std::size_t i) {
  std::size_t r = 0;
  for (std::size_t j = 0; j <= i; ++j) r += s[j] <= c;
  return r;
}

inline unsigned levels_for(std::uint64_t sigma) {
  unsigned L = 0;
  while ((std::uint64_t{1} << L) < sigma) ++L;
  return L;
}

/// Node of the textbook recursive construction: heap id -> bitmap.
struct SerialNode {
  unsigned level = 0;
  std::vector<bool> bits;
};

/// Recursive sequential wavelet tree over the padded alphabet
/// [0, 2^ceil(log2 sigma)). A node with alphabet range <= 2 has no children;
/// empty children are not created.
inline std::map<std::uint64_t, SerialNode> serial_wavelet_tree(const std::vector<std::uint32_t>& s,
                                                               std::uint64_t sigma) {
  std::map<std::uint64_t, SerialNode> nodes;
  const unsigned L = levels_for(sigma);
  if (L == 0) return nodes;
  struct Task {
    std::vector<std::uint32_t> syms;
    std::uint64_t id;
    unsigned level;
    std::uint64_t range;
  };
  std::vector<Task> stack{{s, 0, 0, std::uint64_t{1} << L}};
  while (!stack.empty()) {
    Task t = std::move(stack.back());
    stack.pop_back();
    const std::uint64_t mask = std::uint64_t{1} << (L - t.level - 1);
    SerialNode node;
    node.level = t.level;
    std::vector<std::uint32_t> left, right;
    for (auto v : t.syms) {
      node.bits.push_back((v & mask) != 0);
      ((v & mask) ? right : left).push_back(v);
    }
    nodes[t.id] = std::move(node);
    if (t.range <= 2) continue;
    if (!left.empty()) stack.push_back({std::move(left), 2 * t.id + 1, t.level + 1, t.range / 2});
    if (!right.empty()) stack.push_back({std::move(right), 2 * t.id + 2, t.level + 1, t.range / 2});
  }
  return nodes;
}

inline std::vector<std::uint32_t> random_sequence(std::size_t n, std::uint64_t sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> dist(0, sigma - 1);
  std::vector<std::uint32_t> s(n);
  for (auto& v : s) v = static_cast<std::uint32_t>(dist(rng));
  return s;
}

inline std::vector<bool> random_bits(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution d(density);
  std::vector<bool> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = d(rng);
  return b;
}

}  // namespace oracle
