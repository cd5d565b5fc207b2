#include "pwt/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>

#include "pwt/parallel.hpp"

namespace pwt {

namespace {

constexpr std::uint64_t kMaxSigma = std::uint64_t{1} << 32;

void finish_sigma(Corpus& c, std::uint64_t declared) {
  if (declared > kMaxSigma) fail(ErrorCode::kInvalidArgument, "sigma above 2^32");
  std::uint64_t mx = 0;
  for (auto v : c.symbols) mx = std::max<std::uint64_t>(mx, v);
  if (declared == 0) {
    c.sigma = c.symbols.empty() ? 1 : mx + 1;
    return;
  }
  if (!c.symbols.empty() && mx >= declared) {
    auto it = std::find_if(c.symbols.begin(), c.symbols.end(), [&](Symbol v) { return v >= declared; });
    fail(ErrorCode::kSymbolOutOfRange, "symbol " + std::to_string(*it) + " at position " +
                                           std::to_string(it - c.symbols.begin()) + " is >= sigma " +
                                           std::to_string(declared));
  }
  c.sigma = declared;
}

template <unsigned Bytes>
void decode_fixed(std::span<const std::uint8_t> in, Corpus& c) {
  if (in.size() % Bytes) {
    fail(ErrorCode::kDecode, "input length " + std::to_string(in.size()) + " is not a multiple of " +
                                 std::to_string(Bytes));
  }
  c.symbols.resize(in.size() / Bytes);
  parallel::parallel_for(0, c.symbols.size(), [&](std::size_t i) {
    std::uint32_t v = 0;
    for (unsigned b = 0; b < Bytes; ++b) v |= std::uint32_t{in[i * Bytes + b]} << (8 * b);
    c.symbols[i] = v;
  });
}

void decode_text(std::span<const std::uint8_t> in, Corpus& c) {
  const char* p = reinterpret_cast<const char*>(in.data());
  const char* end = p + in.size();
  auto space = [](char ch) { return ch == ' ' || ch == '\n' || ch == '\r' || ch == '\t' || ch == ',' ; };
  while (p < end) {
    while (p < end && space(*p)) ++p;
    if (p == end) break;
    std::uint64_t v = 0;
    auto [q, ec] = std::from_chars(p, end, v);
    if (ec == std::errc::result_out_of_range || (ec == std::errc{} && v >= kMaxSigma)) {
      fail(ErrorCode::kDecode, "integer at byte " + std::to_string(p - reinterpret_cast<const char*>(in.data())) +
                                   " does not fit 32 bits");
    }
    if (ec != std::errc{} || (q < end && !space(*q))) {
      fail(ErrorCode::kDecode, "bad integer at byte " +
                                   std::to_string(p - reinterpret_cast<const char*>(in.data())));
    }
    c.symbols.push_back(static_cast<Symbol>(v));
    p = q;
  }
}

}  // namespace

std::optional<CorpusFormat> parse_corpus_format(std::string_view name) {
  if (name == "bytes") return CorpusFormat::kBytes;
  if (name == "u16le") return CorpusFormat::kU16le;
  if (name == "u32le") return CorpusFormat::kU32le;
  if (name == "text-ints") return CorpusFormat::kTextInts;
  return std::nullopt;
}

const char* corpus_format_name(CorpusFormat f) {
  switch (f) {
    case CorpusFormat::kBytes: return "bytes";
    case CorpusFormat::kU16le: return "u16le";
    case CorpusFormat::kU32le: return "u32le";
    case CorpusFormat::kTextInts: return "text-ints";
  }
  return "?";
}

Corpus decode_corpus(std::span<const std::uint8_t> bytes, CorpusFormat format, std::uint64_t sigma) {
  Corpus c;
  switch (format) {
    case CorpusFormat::kBytes: decode_fixed<1>(bytes, c); break;
    case CorpusFormat::kU16le: decode_fixed<2>(bytes, c); break;
    case CorpusFormat::kU32le: decode_fixed<4>(bytes, c); break;
    case CorpusFormat::kTextInts: decode_text(bytes, c); break;
  }
  finish_sigma(c, sigma);
  return c;
}

Corpus load_corpus(const std::string& path, CorpusFormat format, std::uint64_t sigma) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) fail(ErrorCode::kIo, "read failed: " + path);
  return decode_corpus(bytes, format, sigma);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

Corpus random_corpus(std::uint64_t n, std::uint64_t sigma, std::uint64_t seed) {
  if (sigma == 0 || sigma > kMaxSigma) fail(ErrorCode::kInvalidArgument, "sigma must be in [1, 2^32]");
  Corpus c;
  c.sigma = sigma;
  c.symbols.resize(n);
  parallel::parallel_for(0, n, [&](std::size_t i) {
    const std::uint64_t r = splitmix64(seed + (i + 1) * 0x9e3779b97f4a7c15ull);
    c.symbols[i] = static_cast<Symbol>((static_cast<unsigned __int128>(r) * sigma) >> 64);
  });
  return c;
}

}  // namespace pwt
