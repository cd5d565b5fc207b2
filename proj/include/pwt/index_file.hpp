#pragma once

// A built structure of any kind plus its on-disk form.
//
// File layout (little-endian, every field a multiple of 8 bytes after the
// 8-byte magic/version pair):
//   "WTIX", u32 version
//   u32 kind, u32 flags (bit 0: directories stored)
//   u64 n, u64 sigma, u64 param (levels, or arity for multiary)
//   u64 algorithm, u64 node count
//   payload: length-prefixed 64-bit word arrays
//   u64 FNV-1a 64 of every preceding byte

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pwt/packed_wt.hpp"
#include "pwt/variants.hpp"
#include "pwt/wavelet_tree.hpp"

namespace pwt {

enum class StructureKind : std::uint32_t { kPlain = 0, kHuffman = 1, kMatrix = 2, kMultiary = 3 };

enum class Algorithm : std::uint32_t {
  kLevel = 0,
  kSort = 1,
  kMsort = 2,
  kPacked = 3,
  kHuffman = 4,
  kMatrix = 5,
  kMultiary = 6,
};

std::optional<Algorithm> parse_algorithm(std::string_view name);
const char* algorithm_name(Algorithm a);
const char* kind_name(StructureKind k);
StructureKind kind_of(Algorithm a);

class Index {
 public:
  using Variant = std::variant<WaveletTree, HuffmanWT, WaveletMatrix, MultiaryWT>;

  Index() = default;
  Index(Algorithm algo, Variant v) : algo_(algo), v_(std::move(v)) {}

  /// d is only used by kMultiary (power of two in [2, 256]).
  static Index build(std::span<const Symbol> s, std::uint64_t sigma, Algorithm algo, unsigned d = 4,
                     bool directories = true);

  Algorithm algorithm() const { return algo_; }
  StructureKind kind() const { return static_cast<StructureKind>(v_.index()); }
  const Variant& structure() const { return v_; }
  Variant& structure() { return v_; }

  std::uint64_t size() const;
  std::uint64_t sigma() const;
  /// Levels for the binary kinds, arity for multiary.
  std::uint64_t param() const;
  std::uint64_t node_count() const;
  std::uint64_t num_levels() const;
  bool has_directories() const;
  void build_directories();
  std::size_t bitmap_bits() const;
  std::size_t directory_bits() const;

  Symbol access(std::uint64_t i) const;
  std::uint64_t rank(std::uint64_t c, std::uint64_t i) const;
  std::uint64_t select(std::uint64_t c, std::uint64_t k) const;

 private:
  Algorithm algo_ = Algorithm::kLevel;
  Variant v_;
};

constexpr std::uint32_t kIndexVersion = 1;
constexpr std::size_t kIndexHeaderBytes = 56;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

/// store_directories requires has_directories(). Without stored directories
/// they are rebuilt on load.
std::vector<std::uint8_t> serialize_index(const Index& idx, bool store_directories = true);
/// Throws kFormat for malformed content and kChecksum for a checksum
/// mismatch.
Index deserialize_index(std::span<const std::uint8_t> bytes, bool directories = true);

/// Test hook: flips bit `pos` (mod length) of the first stored bitmap or
/// digit sequence and rebuilds directories, leaving a structure that no
/// longer matches its input.
void inject_fault(Index& idx, std::uint64_t pos);

void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::string& path);

}  // namespace pwt
