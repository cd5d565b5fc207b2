#include "pwt/pwt.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "pwt/corpus.hpp"
#include "pwt/index_file.hpp"
#include "pwt/parallel.hpp"

struct pwt_sequence {
  pwt::Corpus corpus;
};

struct pwt_index {
  pwt::Index index;
};

namespace {

thread_local std::string g_error;

template <class F>
int guarded(F&& f) {
  try {
    f();
    g_error.clear();
    return PWT_OK;
  } catch (const pwt::Error& e) {
    g_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return PWT_E_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return PWT_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) pwt::fail(pwt::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* pwt_last_error(void) { return g_error.c_str(); }

const char* pwt_status_name(int status) {
  switch (status) {
    case PWT_OK: return "ok";
    case PWT_E_INVALID_ARGUMENT: return "invalid argument";
    case PWT_E_SYMBOL_OUT_OF_RANGE: return "symbol out of range";
    case PWT_E_OUT_OF_RANGE: return "position out of range";
    case PWT_E_NO_SUCH_OCCURRENCE: return "no such occurrence";
    case PWT_E_OVERFLOW: return "overflow";
    case PWT_E_IO: return "i/o error";
    case PWT_E_FORMAT: return "malformed index";
    case PWT_E_CHECKSUM: return "checksum mismatch";
    case PWT_E_DECODE: return "decode error";
    default: return "internal error";
  }
}

const char* pwt_kind_name(uint32_t kind) {
  return kind <= 3 ? pwt::kind_name(static_cast<pwt::StructureKind>(kind)) : "?";
}

const char* pwt_algorithm_name(uint32_t algorithm) {
  return algorithm <= 6 ? pwt::algorithm_name(static_cast<pwt::Algorithm>(algorithm)) : "?";
}

void pwt_set_threads(int threads) { pwt::parallel::set_num_threads(threads); }
int pwt_get_threads(void) { return pwt::parallel::num_threads(); }

int pwt_sequence_load(const char* path, const char* format, uint64_t sigma, pwt_sequence** out) {
  return guarded([&] {
    need(path, "path");
    need(format, "format");
    need(out, "out");
    auto f = pwt::parse_corpus_format(format);
    if (!f) pwt::fail(pwt::ErrorCode::kInvalidArgument, std::string("unknown format ") + format);
    *out = new pwt_sequence{pwt::load_corpus(path, *f, sigma)};
  });
}

int pwt_sequence_random(uint64_t n, uint64_t sigma, uint64_t seed, pwt_sequence** out) {
  return guarded([&] {
    need(out, "out");
    *out = new pwt_sequence{pwt::random_corpus(n, sigma, seed)};
  });
}

int pwt_sequence_from_array(const uint32_t* data, uint64_t n, uint64_t sigma, pwt_sequence** out) {
  return guarded([&] {
    need(out, "out");
    if (n) need(data, "data");
    pwt::Corpus c;
    c.symbols.assign(data, data + n);
    pwt::validate_sequence(c.symbols, sigma);
    c.sigma = sigma;
    *out = new pwt_sequence{std::move(c)};
  });
}

uint64_t pwt_sequence_size(const pwt_sequence* s) { return s ? s->corpus.symbols.size() : 0; }
uint64_t pwt_sequence_sigma(const pwt_sequence* s) { return s ? s->corpus.sigma : 0; }
const uint32_t* pwt_sequence_data(const pwt_sequence* s) { return s ? s->corpus.symbols.data() : nullptr; }
void pwt_sequence_free(pwt_sequence* s) { delete s; }

int pwt_build(const pwt_sequence* s, const char* algorithm, unsigned arity, int directories, pwt_index** out) {
  return guarded([&] {
    need(s, "sequence");
    need(algorithm, "algorithm");
    need(out, "out");
    auto a = pwt::parse_algorithm(algorithm);
    if (!a) pwt::fail(pwt::ErrorCode::kInvalidArgument, std::string("unknown algorithm ") + algorithm);
    *out = new pwt_index{pwt::Index::build(s->corpus.symbols, s->corpus.sigma, *a, arity, directories != 0)};
  });
}

int pwt_build_directories(pwt_index* idx) {
  return guarded([&] {
    need(idx, "index");
    idx->index.build_directories();
  });
}

int pwt_index_info(const pwt_index* idx, pwt_info* out) {
  return guarded([&] {
    need(idx, "index");
    need(out, "out");
    const auto& x = idx->index;
    pwt_info info{};
    info.n = x.size();
    info.sigma = x.sigma();
    info.kind = static_cast<uint32_t>(x.kind());
    info.algorithm = static_cast<uint32_t>(x.algorithm());
    info.levels = static_cast<uint32_t>(x.num_levels());
    info.arity = x.kind() == pwt::StructureKind::kMultiary ? static_cast<uint32_t>(x.param()) : 2;
    info.nodes = x.node_count();
    info.bitmap_bits = x.bitmap_bits();
    info.directory_bits = x.has_directories() ? x.directory_bits() : 0;
    info.has_directories = x.has_directories() ? 1 : 0;
    *out = info;
  });
}

void pwt_index_free(pwt_index* idx) { delete idx; }

int pwt_access(const pwt_index* idx, uint64_t i, uint32_t* out) {
  return guarded([&] {
    need(idx, "index");
    need(out, "out");
    *out = idx->index.access(i);
  });
}

int pwt_rank(const pwt_index* idx, uint64_t c, uint64_t i, uint64_t* out) {
  return guarded([&] {
    need(idx, "index");
    need(out, "out");
    *out = idx->index.rank(c, i);
  });
}

int pwt_select(const pwt_index* idx, uint64_t c, uint64_t k, uint64_t* out) {
  return guarded([&] {
    need(idx, "index");
    need(out, "out");
    *out = idx->index.select(c, k);
  });
}

int pwt_inject_fault(pwt_index* idx, uint64_t pos) {
  return guarded([&] {
    need(idx, "index");
    pwt::inject_fault(idx->index, pos);
  });
}

int pwt_serialize(const pwt_index* idx, int store_directories, uint8_t** buf, uint64_t* len) {
  return guarded([&] {
    need(idx, "index");
    need(buf, "buf");
    need(len, "len");
    auto bytes = pwt::serialize_index(idx->index, store_directories != 0);
    auto* p = static_cast<uint8_t*>(std::malloc(bytes.empty() ? 1 : bytes.size()));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, bytes.data(), bytes.size());
    *buf = p;
    *len = bytes.size();
  });
}

int pwt_deserialize(const uint8_t* buf, uint64_t len, pwt_index** out) {
  return guarded([&] {
    need(out, "out");
    if (len) need(buf, "buf");
    *out = new pwt_index{pwt::deserialize_index(std::span<const uint8_t>(buf, len))};
  });
}

void pwt_buffer_free(uint8_t* buf) { std::free(buf); }

int pwt_save(const pwt_index* idx, const char* path, int store_directories) {
  return guarded([&] {
    need(idx, "index");
    need(path, "path");
    pwt::write_file(path, pwt::serialize_index(idx->index, store_directories != 0));
  });
}

int pwt_load(const char* path, pwt_index** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pwt_index{pwt::deserialize_index(pwt::read_file(path))};
  });
}

}  // extern "C"
