#pragma once

// Input sequences: decoding files in a few fixed encodings and a seeded
// random generator.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pwt/wavelet_tree.hpp"

namespace pwt {

enum class CorpusFormat { kBytes, kU16le, kU32le, kTextInts };

std::optional<CorpusFormat> parse_corpus_format(std::string_view name);
const char* corpus_format_name(CorpusFormat f);

struct Corpus {
  std::vector<Symbol> symbols;
  std::uint64_t sigma = 1;
};

/// sigma == 0 means max symbol + 1 (1 for an empty corpus). Throws kDecode
/// on malformed input, kSymbolOutOfRange when a symbol is >= a declared
/// sigma and kInvalidArgument for sigma above 2^32.
Corpus decode_corpus(std::span<const std::uint8_t> bytes, CorpusFormat format, std::uint64_t sigma = 0);

/// Reads and decodes a file; kIo when it cannot be read.
Corpus load_corpus(const std::string& path, CorpusFormat format, std::uint64_t sigma = 0);

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Symbol i is floor(splitmix64(seed + (i + 1) * 0x9e3779b97f4a7c15) * sigma
/// / 2^64), so any prefix or element can be regenerated independently.
Corpus random_corpus(std::uint64_t n, std::uint64_t sigma, std::uint64_t seed);

}  // namespace pwt
