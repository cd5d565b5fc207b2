#include "pwt/index_file.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

namespace pwt {

namespace {

template <class... F>
struct Overload : F... {
  using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

class Writer {
 public:
  void u64(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void words(std::span<const std::uint64_t> w) {
    u64(w.size());
    for (auto v : w) u64(v);
  }
  void words32(std::span<const std::uint32_t> w) {
    u64(w.size());
    for (std::size_t k = 0; k < w.size(); k += 2) {
      std::uint64_t v = w[k];
      if (k + 1 < w.size()) v |= std::uint64_t{w[k + 1]} << 32;
      u64(v);
    }
  }
  void bitmap(const Bitmap& b) {
    u64(b.size());
    words(b.words());
  }
  void packed(const BitPackedArray& a) {
    u64(a.size());
    u64(a.width());
    bitmap(a.bits());
  }
  void rank(const RankDirectory& r) {
    auto p = r.parts();
    u64(p.nbits);
    u64(p.ones);
    packed(p.super);
    packed(p.block);
    packed(p.table);
  }
  void select(const SelectDirectory& s) {
    auto p = s.parts();
    u64(p.nbits);
    u64(p.target ? 1 : 0);
    u64(p.count);
    u64(p.last);
    packed(p.coarse);
    packed(p.offsets);
    bitmap(p.pool);
  }
  void dirs(const RankSelectBitmap& b) {
    rank(b.rank);
    select(b.select0);
    select(b.select1);
  }
  void general(const GeneralRS& g) {
    auto p = g.parts();
    u64(p.n);
    u64(p.sigma);
    words(p.super);
    words32(p.block);
    words(p.freq);
    words(p.last);
    words(p.coarse_begin);
    words(p.coarse);
    words(p.payload);
    words32(p.pool);
  }
  void nodes(const std::vector<std::pair<std::uint64_t, NodeEntry>>& list) {
    u64(list.size());
    for (const auto& [id, e] : list) {
      u64(id);
      u64(e.start);
      u64(e.len);
    }
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= std::uint64_t{in_[at_ + b]} << (8 * b);
    at_ += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t{in_[at_ + b]} << (8 * b);
    at_ += 4;
    return v;
  }
  std::uint64_t count(std::uint64_t unit_bytes) {
    const std::uint64_t c = u64();
    if (c > (in_.size() - at_) / unit_bytes + 1) fail(ErrorCode::kFormat, "array length exceeds file size");
    return c;
  }
  std::vector<std::uint64_t> words() {
    const std::uint64_t c = count(8);
    std::vector<std::uint64_t> w(c);
    for (auto& v : w) v = u64();
    return w;
  }
  std::vector<std::uint32_t> words32() {
    const std::uint64_t c = count(4);
    std::vector<std::uint32_t> w(c);
    for (std::size_t k = 0; k < c; k += 2) {
      const std::uint64_t v = u64();
      w[k] = static_cast<std::uint32_t>(v);
      if (k + 1 < c) w[k + 1] = static_cast<std::uint32_t>(v >> 32);
      else if (v >> 32) fail(ErrorCode::kFormat, "nonzero padding");
    }
    return w;
  }
  Bitmap bitmap() {
    const std::uint64_t nbits = u64();
    if (nbits / 8 > in_.size()) fail(ErrorCode::kFormat, "bitmap length exceeds file size");
    auto w = words();
    Bitmap b(nbits);
    if (w.size() != b.num_words()) fail(ErrorCode::kFormat, "bitmap word count mismatch");
    if (nbits % kWordBits && !w.empty() && (w.back() >> (nbits % kWordBits))) {
      fail(ErrorCode::kFormat, "nonzero bits past the end of a bitmap");
    }
    std::copy(w.begin(), w.end(), b.mutable_words().begin());
    return b;
  }
  BitPackedArray packed() {
    const std::uint64_t cnt = u64();
    const std::uint64_t width = u64();
    if (width > 64) fail(ErrorCode::kFormat, "packed width above 64");
    Bitmap b = bitmap();
    if (b.size() != cnt * width) fail(ErrorCode::kFormat, "packed array size mismatch");
    return BitPackedArray::from_raw(std::move(b), cnt, static_cast<unsigned>(width));
  }
  RankDirectory rank() {
    RankDirectory::Parts p;
    p.nbits = u64();
    p.ones = u64();
    p.super = packed();
    p.block = packed();
    p.table = packed();
    return RankDirectory::from_parts(std::move(p));
  }
  SelectDirectory select() {
    SelectDirectory::Parts p;
    p.nbits = u64();
    const std::uint64_t t = u64();
    if (t > 1) fail(ErrorCode::kFormat, "bad select target");
    p.target = t == 1;
    p.count = u64();
    p.last = u64();
    p.coarse = packed();
    p.offsets = packed();
    p.pool = bitmap();
    return SelectDirectory::from_parts(std::move(p));
  }
  void dirs(RankSelectBitmap& b) {
    b.rank = rank();
    b.select0 = select();
    b.select1 = select();
    if (b.rank.parts().nbits != b.bits.size() || b.select0.target() || !b.select1.target() ||
        b.select0.parts().nbits != b.bits.size() || b.select1.parts().nbits != b.bits.size()) {
      fail(ErrorCode::kFormat, "directory does not match its bitmap");
    }
  }
  GeneralRS general() {
    GeneralRS::Parts p;
    p.n = u64();
    const std::uint64_t sigma = u64();
    if (sigma == 0 || sigma > GeneralRS::kMaxSigma) fail(ErrorCode::kFormat, "bad sigma in rank/select part");
    p.sigma = static_cast<unsigned>(sigma);
    p.super = words();
    p.block = words32();
    p.freq = words();
    p.last = words();
    p.coarse_begin = words();
    p.coarse = words();
    p.payload = words();
    p.pool = words32();
    return GeneralRS::from_parts(std::move(p));
  }
  std::vector<std::pair<std::uint64_t, NodeEntry>> nodes() {
    const std::uint64_t c = count(24);
    std::vector<std::pair<std::uint64_t, NodeEntry>> out(c);
    for (auto& [id, e] : out) {
      id = u64();
      e.start = u64();
      e.len = u64();
    }
    return out;
  }
  bool done() const { return at_ == in_.size(); }

 private:
  void need(std::size_t k) const {
    if (in_.size() - at_ < k) fail(ErrorCode::kFormat, "truncated index");
  }
  std::span<const std::uint8_t> in_;
  std::size_t at_ = 0;
};

void rethrow_as_format(const Error& e) {
  if (e.code() == ErrorCode::kChecksum || e.code() == ErrorCode::kFormat) throw e;
  fail(ErrorCode::kFormat, std::string("inconsistent index: ") + e.what());
}

}  // namespace

// Private-member access for the codec.
struct IndexCodec {
  static void inject(Index& idx, std::uint64_t pos) {
    const bool dirs = idx.has_directories();
    auto flip = [&](Bitmap& b) {
      if (b.size() == 0) fail(ErrorCode::kInvalidArgument, "nothing to corrupt in an empty structure");
      const std::uint64_t p = pos % b.size();
      b.set(p, !b.get(p));
    };
    std::visit(Overload{
                   [&](WaveletTree& t) {
                     if (t.levels_.empty()) fail(ErrorCode::kInvalidArgument, "structure has no levels");
                     flip(t.levels_[0].bits);
                   },
                   [&](HuffmanWT& h) {
                     if (h.nodes_.empty()) fail(ErrorCode::kInvalidArgument, "structure has no nodes");
                     flip(h.nodes_[0].bits);
                   },
                   [&](WaveletMatrix& m) {
                     if (m.levels_.empty()) fail(ErrorCode::kInvalidArgument, "structure has no levels");
                     flip(m.levels_[0].bits);
                     m.z_[0] = m.n_ - m.levels_[0].bits.count_ones();
                   },
                   [&](MultiaryWT& m) {
                     if (m.digits_.empty()) fail(ErrorCode::kInvalidArgument, "structure has no levels");
                     Bitmap b = m.digits_[0].bits();
                     flip(b);
                     const auto count = m.digits_[0].size();
                     const auto width = m.digits_[0].width();
                     m.digits_[0] = BitPackedArray::from_raw(std::move(b), count, width);
                   },
               },
               idx.structure());
    if (dirs) idx.build_directories();
  }

  static void write(Writer& w, const WaveletTree& t, bool dirs) {
    for (const auto& lv : t.levels_) w.bitmap(lv.bits);
    std::vector<std::pair<std::uint64_t, NodeEntry>> all(t.nodes_.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = {t.nodes_.id_at(k), t.nodes_.entry_at(k)};
    w.nodes(all);
    if (dirs) {
      for (const auto& lv : t.levels_) w.dirs(lv);
    }
  }
  static WaveletTree read_plain(Reader& r, std::uint64_t n, std::uint64_t sigma, std::uint64_t L, bool stored,
                                bool directories) {
    if (L != levels_for_sigma(sigma)) fail(ErrorCode::kFormat, "level count does not match sigma");
    std::vector<Bitmap> levels(L);
    for (auto& b : levels) b = r.bitmap();
    auto all = r.nodes();
    std::vector<std::vector<std::pair<std::uint64_t, NodeEntry>>> per(L);
    for (const auto& [id, e] : all) {
      const unsigned l = node_level(id);
      if (l >= L) fail(ErrorCode::kFormat, "node id beyond the last level");
      if (!per[l].empty() && per[l].back().first >= id) fail(ErrorCode::kFormat, "node ids not ascending");
      per[l].push_back({id, e});
    }
    WaveletTree t = WaveletTree::from_parts(n, sigma, std::move(levels),
                                            NodeTable::from_levels(static_cast<unsigned>(L), std::move(per)), false);
    if (stored) {
      for (auto& lv : t.levels_) r.dirs(lv);
      t.has_dirs_ = true;
    } else if (directories) {
      t.build_directories();
    }
    return t;
  }

  static void write(Writer& w, const HuffmanWT& h, bool dirs) {
    w.u64(h.freqs_.size());
    for (const auto& [c, f] : h.freqs_) {
      w.u64(c);
      w.u64(f);
    }
    for (const auto& nd : h.nodes_) w.bitmap(nd.bits);
    if (dirs) {
      for (const auto& nd : h.nodes_) w.dirs(nd);
    }
  }
  static HuffmanWT read_huffman(Reader& r, std::uint64_t n, std::uint64_t sigma, std::uint64_t nodes, bool stored,
                                bool directories) {
    const std::uint64_t m = r.count(16);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> freqs(m);
    for (auto& [c, f] : freqs) {
      c = r.u64();
      f = r.u64();
    }
    for (std::size_t k = 1; k < m; ++k) {
      if (freqs[k].first <= freqs[k - 1].first) fail(ErrorCode::kFormat, "huffman symbols not ascending");
    }
    if (nodes > n + 1) fail(ErrorCode::kFormat, "huffman node count too large");
    std::vector<Bitmap> bitmaps(nodes);
    for (auto& b : bitmaps) b = r.bitmap();
    HuffmanWT h = HuffmanWT::from_parts(n, sigma, std::move(freqs), std::move(bitmaps), false);
    if (stored) {
      for (auto& nd : h.nodes_) r.dirs(nd);
      h.has_dirs_ = true;
    } else if (directories) {
      h.build_directories();
    }
    return h;
  }

  static void write(Writer& w, const WaveletMatrix& m, bool dirs) {
    w.words(m.z_);
    for (const auto& lv : m.levels_) w.bitmap(lv.bits);
    if (dirs) {
      for (const auto& lv : m.levels_) w.dirs(lv);
    }
  }
  static WaveletMatrix read_matrix(Reader& r, std::uint64_t n, std::uint64_t sigma, std::uint64_t L, bool stored,
                                   bool directories) {
    if (L != levels_for_sigma(sigma)) fail(ErrorCode::kFormat, "level count does not match sigma");
    auto z = r.words();
    std::vector<Bitmap> levels(L);
    for (auto& b : levels) b = r.bitmap();
    WaveletMatrix m = WaveletMatrix::from_parts(n, sigma, std::move(levels), false);
    if (z != m.z_) fail(ErrorCode::kFormat, "stored zero counts do not match the levels");
    if (stored) {
      for (auto& lv : m.levels_) r.dirs(lv);
      m.has_dirs_ = true;
    } else if (directories) {
      m.build_directories();
    }
    return m;
  }

  static void write(Writer& w, const MultiaryWT& m, bool dirs) {
    for (const auto& d : m.digits_) w.packed(d);
    for (const auto& lv : m.nodes_) w.nodes(lv);
    if (dirs) {
      for (const auto& rs : m.rs_) w.general(rs);
    }
  }
  static MultiaryWT read_multiary(Reader& r, std::uint64_t n, std::uint64_t sigma, std::uint64_t d, bool stored,
                                  bool directories) {
    if (d < 2 || d > MultiaryWT::kMaxArity) fail(ErrorCode::kFormat, "bad arity");
    const unsigned log_d = bit_width_of(d) - 1;
    if (sigma == 0 || sigma > (std::uint64_t{1} << 32)) fail(ErrorCode::kFormat, "sigma out of range");
    const unsigned levels = (levels_for_sigma(sigma) + log_d - 1) / log_d;
    std::vector<BitPackedArray> digits(levels);
    for (auto& a : digits) a = r.packed();
    std::vector<std::vector<std::pair<std::uint64_t, NodeEntry>>> nodes(levels);
    for (auto& lv : nodes) lv = r.nodes();
    MultiaryWT m = MultiaryWT::from_parts(n, sigma, static_cast<unsigned>(d), std::move(digits), false);
    if (nodes != m.nodes_) fail(ErrorCode::kFormat, "stored node table does not match the digits");
    if (stored) {
      m.rs_.resize(levels);
      for (unsigned l = 0; l < levels; ++l) {
        m.rs_[l] = r.general();
        if (m.rs_[l].size() != n || m.rs_[l].sigma() != d) fail(ErrorCode::kFormat, "rank/select part shape mismatch");
      }
      m.has_dirs_ = true;
    } else if (directories) {
      m.build_directories();
    }
    return m;
  }
};

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  static constexpr std::pair<std::string_view, Algorithm> kNames[] = {
      {"level", Algorithm::kLevel},     {"sort", Algorithm::kSort},     {"msort", Algorithm::kMsort},
      {"packed", Algorithm::kPacked},   {"huffman", Algorithm::kHuffman}, {"matrix", Algorithm::kMatrix},
      {"multiary", Algorithm::kMultiary},
  };
  for (const auto& [n, a] : kNames) {
    if (n == name) return a;
  }
  return std::nullopt;
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kLevel: return "level";
    case Algorithm::kSort: return "sort";
    case Algorithm::kMsort: return "msort";
    case Algorithm::kPacked: return "packed";
    case Algorithm::kHuffman: return "huffman";
    case Algorithm::kMatrix: return "matrix";
    case Algorithm::kMultiary: return "multiary";
  }
  return "?";
}

const char* kind_name(StructureKind k) {
  switch (k) {
    case StructureKind::kPlain: return "plain";
    case StructureKind::kHuffman: return "huffman";
    case StructureKind::kMatrix: return "matrix";
    case StructureKind::kMultiary: return "multiary";
  }
  return "?";
}

StructureKind kind_of(Algorithm a) {
  switch (a) {
    case Algorithm::kHuffman: return StructureKind::kHuffman;
    case Algorithm::kMatrix: return StructureKind::kMatrix;
    case Algorithm::kMultiary: return StructureKind::kMultiary;
    default: return StructureKind::kPlain;
  }
}

Index Index::build(std::span<const Symbol> s, std::uint64_t sigma, Algorithm algo, unsigned d, bool directories) {
  switch (algo) {
    case Algorithm::kLevel: return {algo, WaveletTree::build_level(s, sigma, directories)};
    case Algorithm::kSort: return {algo, WaveletTree::build_sort(s, sigma, directories)};
    case Algorithm::kMsort: return {algo, WaveletTree::build_msort(s, sigma, directories)};
    case Algorithm::kPacked: return {algo, build_packed_wt(s, sigma, directories)};
    case Algorithm::kHuffman: return {algo, HuffmanWT::build(s, sigma, directories)};
    case Algorithm::kMatrix: return {algo, WaveletMatrix::build(s, sigma, directories)};
    case Algorithm::kMultiary: return {algo, MultiaryWT::build(s, sigma, d, directories)};
  }
  fail(ErrorCode::kInvalidArgument, "unknown algorithm");
}

std::uint64_t Index::size() const {
  return std::visit([](const auto& t) -> std::uint64_t { return t.size(); }, v_);
}
std::uint64_t Index::sigma() const {
  return std::visit([](const auto& t) -> std::uint64_t { return t.sigma(); }, v_);
}
bool Index::has_directories() const {
  return std::visit([](const auto& t) { return t.has_directories(); }, v_);
}
void Index::build_directories() {
  std::visit([](auto& t) { t.build_directories(); }, v_);
}
std::size_t Index::directory_bits() const {
  return std::visit([](const auto& t) -> std::size_t { return t.directory_bits(); }, v_);
}
Symbol Index::access(std::uint64_t i) const {
  return std::visit([&](const auto& t) { return t.access(i); }, v_);
}
std::uint64_t Index::rank(std::uint64_t c, std::uint64_t i) const {
  return std::visit([&](const auto& t) { return t.rank(c, i); }, v_);
}
std::uint64_t Index::select(std::uint64_t c, std::uint64_t k) const {
  return std::visit([&](const auto& t) { return t.select(c, k); }, v_);
}

std::uint64_t Index::param() const {
  return std::visit(Overload{
                        [](const MultiaryWT& m) -> std::uint64_t { return m.arity(); },
                        [](const auto& t) -> std::uint64_t { return levels_for_sigma(t.sigma()); },
                    },
                    v_);
}

std::uint64_t Index::num_levels() const {
  return std::visit(Overload{
                        [](const MultiaryWT& m) -> std::uint64_t { return m.num_levels(); },
                        [](const auto& t) -> std::uint64_t { return levels_for_sigma(t.sigma()); },
                    },
                    v_);
}

std::uint64_t Index::node_count() const {
  return std::visit(Overload{
                        [](const WaveletTree& t) -> std::uint64_t { return t.nodes().size(); },
                        [](const HuffmanWT& h) -> std::uint64_t { return h.num_nodes(); },
                        [](const WaveletMatrix&) -> std::uint64_t { return 0; },
                        [](const MultiaryWT& m) -> std::uint64_t {
                          std::uint64_t c = 0;
                          for (unsigned l = 0; l < m.num_levels(); ++l) c += m.level_nodes(l).size();
                          return c;
                        },
                    },
                    v_);
}

std::size_t Index::bitmap_bits() const {
  return std::visit(Overload{
                        [](const WaveletTree& t) -> std::size_t { return t.bitmap_bits(); },
                        [](const HuffmanWT& h) -> std::size_t { return h.bitmap_bits(); },
                        [](const WaveletMatrix& m) -> std::size_t { return m.size() * m.num_levels(); },
                        [](const MultiaryWT& m) -> std::size_t {
                          std::size_t b = 0;
                          for (unsigned l = 0; l < m.num_levels(); ++l) b += m.digits(l).size() * m.digits(l).width();
                          return b;
                        },
                    },
                    v_);
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::uint8_t> serialize_index(const Index& idx, bool store_directories) {
  if (store_directories && !idx.has_directories()) {
    fail(ErrorCode::kInvalidArgument, "cannot store directories that were not built");
  }
  Writer w;
  for (char ch : {'W', 'T', 'I', 'X'}) w.bytes().push_back(static_cast<std::uint8_t>(ch));
  w.u32(kIndexVersion);
  w.u32(static_cast<std::uint32_t>(idx.kind()));
  w.u32(store_directories ? 1u : 0u);
  w.u64(idx.size());
  w.u64(idx.sigma());
  w.u64(idx.param());
  w.u64(static_cast<std::uint64_t>(idx.algorithm()));
  w.u64(idx.node_count());
  std::visit([&](const auto& t) { IndexCodec::write(w, t, store_directories); }, idx.structure());
  w.u64(fnv1a64(w.bytes()));
  return std::move(w.bytes());
}

Index deserialize_index(std::span<const std::uint8_t> bytes, bool directories) {
  if (bytes.size() < kIndexHeaderBytes + 8 || bytes.size() % 8) fail(ErrorCode::kFormat, "not an index file");
  if (std::memcmp(bytes.data(), "WTIX", 4) != 0) fail(ErrorCode::kFormat, "bad magic");
  const std::size_t body = bytes.size() - 8;
  Reader tail(bytes.subspan(body));
  if (tail.u64() != fnv1a64(bytes.first(body))) fail(ErrorCode::kChecksum, "checksum mismatch");

  Reader r(bytes.first(body));
  r.u32();
  const std::uint32_t version = r.u32();
  if (version != kIndexVersion) fail(ErrorCode::kFormat, "unsupported index version " + std::to_string(version));
  const std::uint32_t kind = r.u32();
  const std::uint32_t flags = r.u32();
  if (flags & ~1u) fail(ErrorCode::kFormat, "unknown flags");
  const bool stored = flags & 1u;
  const std::uint64_t n = r.u64();
  const std::uint64_t sigma = r.u64();
  const std::uint64_t param = r.u64();
  const std::uint64_t algo = r.u64();
  const std::uint64_t nodes = r.u64();
  if (sigma == 0 || sigma > (std::uint64_t{1} << 32)) fail(ErrorCode::kFormat, "sigma out of range");
  if (algo > static_cast<std::uint64_t>(Algorithm::kMultiary)) fail(ErrorCode::kFormat, "unknown algorithm");
  const auto a = static_cast<Algorithm>(algo);
  if (kind > 3 || static_cast<StructureKind>(kind) != kind_of(a)) fail(ErrorCode::kFormat, "kind does not match algorithm");

  try {
    Index idx;
    switch (static_cast<StructureKind>(kind)) {
      case StructureKind::kPlain:
        idx = Index(a, IndexCodec::read_plain(r, n, sigma, param, stored, directories));
        break;
      case StructureKind::kHuffman:
        idx = Index(a, IndexCodec::read_huffman(r, n, sigma, nodes, stored, directories));
        break;
      case StructureKind::kMatrix:
        idx = Index(a, IndexCodec::read_matrix(r, n, sigma, param, stored, directories));
        break;
      case StructureKind::kMultiary:
        idx = Index(a, IndexCodec::read_multiary(r, n, sigma, param, stored, directories));
        break;
    }
    if (!r.done()) fail(ErrorCode::kFormat, "trailing bytes before checksum");
    if (idx.node_count() != nodes || idx.param() != param) fail(ErrorCode::kFormat, "header does not match payload");
    return idx;
  } catch (const Error& e) {
    rethrow_as_format(e);
  }
  return {};
}

void inject_fault(Index& idx, std::uint64_t pos) { IndexCodec::inject(idx, pos); }

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorCode::kIo, "write failed: " + path);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) fail(ErrorCode::kIo, "read failed: " + path);
  return bytes;
}

}  // namespace pwt
