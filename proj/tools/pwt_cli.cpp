// pwt: build, query, verify and benchmark wavelet-tree indexes.
// Talks to the library only through pwt.h.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pwt/pwt.h"

namespace {

enum Exit : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitInvalid = 3,
  kExitSymbol = 4,
  kExitRange = 5,
  kExitNoOccurrence = 6,
  kExitOverflow = 7,
  kExitIo = 8,
  kExitFormat = 9,
  kExitChecksum = 10,
  kExitDecode = 11,
  kExitMismatch = 12,
  kExitInternal = 13,
};

int exit_for_status(int status) {
  switch (status) {
    case PWT_OK: return kExitOk;
    case PWT_E_INVALID_ARGUMENT: return kExitInvalid;
    case PWT_E_SYMBOL_OUT_OF_RANGE: return kExitSymbol;
    case PWT_E_OUT_OF_RANGE: return kExitRange;
    case PWT_E_NO_SUCH_OCCURRENCE: return kExitNoOccurrence;
    case PWT_E_OVERFLOW: return kExitOverflow;
    case PWT_E_IO: return kExitIo;
    case PWT_E_FORMAT: return kExitFormat;
    case PWT_E_CHECKSUM: return kExitChecksum;
    case PWT_E_DECODE: return kExitDecode;
    default: return kExitInternal;
  }
}

struct Failure {
  int exit;
  std::string message;
};

void check(int status, const std::string& what) {
  if (status == PWT_OK) return;
  std::string msg = what + ": " + pwt_status_name(status);
  const std::string detail = pwt_last_error();
  if (!detail.empty() && detail != pwt_status_name(status)) msg += " (" + detail + ")";
  throw Failure{exit_for_status(status), msg};
}

struct SeqDeleter {
  void operator()(pwt_sequence* s) const { pwt_sequence_free(s); }
};
struct IndexDeleter {
  void operator()(pwt_index* x) const { pwt_index_free(x); }
};
using Sequence = std::unique_ptr<pwt_sequence, SeqDeleter>;
using IndexPtr = std::unique_ptr<pwt_index, IndexDeleter>;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Corpus selection shared by build, verify and bench.
struct CorpusArgs {
  std::string input;
  std::string format = "bytes";
  std::string sigma = "auto";
  std::string rand;  // N:SIGMA[:SEED]

  void add_to(CLI::App* app) {
    auto* in = app->add_option("--input", input, "corpus file");
    auto* rnd = app->add_option("--rand", rand, "random corpus N:SIGMA[:SEED], uniform symbols");
    in->excludes(rnd);
    app->add_option("--format", format, "bytes, u16le, u32le or text-ints")
        ->check(CLI::IsMember({"bytes", "u16le", "u32le", "text-ints"}));
    app->add_option("--sigma", sigma, "alphabet size or auto (max symbol + 1)");
  }

  // Flags that reproduce this corpus on another command line.
  std::string flags() const {
    if (!rand.empty()) return "--rand " + rand;
    return "--input " + input + " --format " + format + " --sigma " + sigma;
  }

  Sequence load() const {
    pwt_sequence* s = nullptr;
    if (!rand.empty()) {
      std::vector<std::uint64_t> parts;
      std::stringstream ss(rand);
      std::string tok;
      while (std::getline(ss, tok, ':')) {
        try {
          std::size_t used = 0;
          parts.push_back(std::stoull(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw Failure{kExitUsage, "bad --rand value " + rand};
        }
      }
      if (parts.size() < 2 || parts.size() > 3) throw Failure{kExitUsage, "--rand expects N:SIGMA[:SEED]"};
      check(pwt_sequence_random(parts[0], parts[1], parts.size() == 3 ? parts[2] : 0, &s), "random corpus");
      return Sequence(s);
    }
    if (input.empty()) throw Failure{kExitUsage, "one of --input or --rand is required"};
    std::uint64_t sig = 0;
    if (sigma != "auto") {
      try {
        std::size_t used = 0;
        sig = std::stoull(sigma, &used);
        if (used != sigma.size() || sig == 0) throw std::invalid_argument(sigma);
      } catch (const std::exception&) {
        throw Failure{kExitUsage, "--sigma expects auto or a positive integer"};
      }
    }
    check(pwt_sequence_load(input.c_str(), format.c_str(), sig, &s), "loading " + input);
    return Sequence(s);
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

long peak_rss_kib() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return ru.ru_maxrss;
}

IndexPtr load_index(const std::string& path) {
  pwt_index* x = nullptr;
  check(pwt_load(path.c_str(), &x), "loading " + path);
  return IndexPtr(x);
}

pwt_info info_of(const pwt_index* x) {
  pwt_info info{};
  check(pwt_index_info(x, &info), "info");
  return info;
}

// --- build -----------------------------------------------------------------

struct BuildArgs {
  CorpusArgs corpus;
  std::string algo = "level";
  unsigned d = 4;
  std::string out;
  bool no_store_dirs = false;
};

int run_build(const BuildArgs& a) {
  auto seq = a.corpus.load();
  auto t0 = Clock::now();
  pwt_index* raw = nullptr;
  check(pwt_build(seq.get(), a.algo.c_str(), a.d, 0, &raw), "build");
  IndexPtr idx(raw);
  const double build_s = seconds_since(t0);
  t0 = Clock::now();
  check(pwt_build_directories(idx.get()), "directories");
  const double dir_s = seconds_since(t0);
  check(pwt_save(idx.get(), a.out.c_str(), a.no_store_dirs ? 0 : 1), "writing " + a.out);

  const auto info = info_of(idx.get());
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(a.out, ec);
  std::printf("algorithm        %s\n", pwt_algorithm_name(info.algorithm));
  std::printf("kind             %s\n", pwt_kind_name(info.kind));
  std::printf("threads          %d\n", pwt_get_threads());
  std::printf("n                %llu\n", static_cast<unsigned long long>(info.n));
  std::printf("sigma            %llu\n", static_cast<unsigned long long>(info.sigma));
  std::printf("levels           %u\n", info.levels);
  std::printf("nodes            %llu\n", static_cast<unsigned long long>(info.nodes));
  std::printf("build_seconds    %.6f\n", build_s);
  std::printf("dir_seconds      %.6f\n", dir_s);
  std::printf("peak_rss_kib     %ld\n", peak_rss_kib());
  std::printf("bitmap_bits      %llu\n", static_cast<unsigned long long>(info.bitmap_bits));
  std::printf("directory_bits   %llu\n", static_cast<unsigned long long>(info.directory_bits));
  std::printf("file_bytes       %llu\n", static_cast<unsigned long long>(ec ? 0 : bytes));
  std::printf("directories      %s\n", a.no_store_dirs ? "rebuilt on load" : "stored");
  return kExitOk;
}

// --- query -----------------------------------------------------------------

struct QueryArgs {
  std::string index;
  std::string op;
  std::vector<std::uint64_t> args;
};

int run_query(const QueryArgs& a) {
  const std::size_t want = a.op == "access" ? 1 : 2;
  if (a.args.size() != want) {
    throw Failure{kExitUsage, a.op + (want == 1 ? " takes one argument: i" : a.op == "rank" ? " takes two arguments: c i" : " takes two arguments: c k")};
  }
  auto idx = load_index(a.index);
  if (a.op == "access") {
    std::uint32_t v = 0;
    check(pwt_access(idx.get(), a.args[0], &v), "access");
    std::printf("%u\n", v);
  } else {
    std::uint64_t v = 0;
    if (a.op == "rank") check(pwt_rank(idx.get(), a.args[0], a.args[1], &v), "rank");
    else check(pwt_select(idx.get(), a.args[0], a.args[1], &v), "select");
    std::printf("%llu\n", static_cast<unsigned long long>(v));
  }
  return kExitOk;
}

// --- verify ----------------------------------------------------------------

struct VerifyArgs {
  CorpusArgs corpus;
  std::string index;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  std::int64_t probe = -1;
  bool fault_inject = false;
};

struct Probe {
  int op;  // 0 access, 1 rank, 2 select
  std::uint64_t c, x;
};

// Probe p depends only on (seed, p) so a single probe can be replayed.
Probe make_probe(std::uint64_t seed, std::uint64_t p, const std::uint32_t* s, std::uint64_t n, std::uint64_t sigma) {
  std::uint64_t st = seed ^ (p * 0xd1b54a32d192ed03ULL);
  const std::uint64_t r0 = splitmix64(st), r1 = splitmix64(st), r2 = splitmix64(st), r3 = splitmix64(st);
  if (n == 0) return {2, r1 % sigma, 1};
  Probe q{static_cast<int>(r0 % 3), 0, 0};
  // mostly symbols that occur, sometimes any symbol
  q.c = (r3 & 3) ? s[r1 % n] : r1 % sigma;
  if (q.op == 0) {
    q.x = r2 % n;
  } else if (q.op == 1) {
    q.x = r2 % n;
  } else {
    std::uint64_t occ = 0;
    for (std::uint64_t i = 0; i < n; ++i) occ += s[i] == q.c;
    q.x = 1 + r2 % (occ + 1);  // occ + 1 checks the no-occurrence path
  }
  return q;
}

// Linear-scan answers. status is PWT_E_NO_SUCH_OCCURRENCE when select runs out.
struct Answer {
  int status;
  std::uint64_t value;
};

Answer oracle(const Probe& q, const std::uint32_t* s, std::uint64_t n) {
  if (q.op == 0) return {PWT_OK, s[q.x]};
  if (q.op == 1) {
    std::uint64_t r = 0;
    for (std::uint64_t i = 0; i <= q.x; ++i) r += s[i] == q.c;
    return {PWT_OK, r};
  }
  std::uint64_t seen = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (s[i] == q.c && ++seen == q.x) return {PWT_OK, i};
  }
  return {PWT_E_NO_SUCH_OCCURRENCE, 0};
}

Answer ask(const pwt_index* idx, const Probe& q) {
  if (q.op == 0) {
    std::uint32_t v = 0;
    int st = pwt_access(idx, q.x, &v);
    return {st, v};
  }
  std::uint64_t v = 0;
  int st = q.op == 1 ? pwt_rank(idx, q.c, q.x, &v) : pwt_select(idx, q.c, q.x, &v);
  return {st, v};
}

std::string describe(const Probe& q) {
  static const char* names[] = {"access", "rank", "select"};
  std::ostringstream o;
  o << names[q.op];
  if (q.op == 0) o << " i=" << q.x;
  else o << " c=" << q.c << (q.op == 1 ? " i=" : " k=") << q.x;
  return o.str();
}

std::string show(const Answer& a) {
  if (a.status == PWT_OK) return std::to_string(a.value);
  return std::string("<") + pwt_status_name(a.status) + ">";
}

int run_verify(const VerifyArgs& a) {
  auto seq = a.corpus.load();
  auto idx = load_index(a.index);
  const auto info = info_of(idx.get());
  const std::uint64_t n = pwt_sequence_size(seq.get());
  const std::uint64_t sigma = pwt_sequence_sigma(seq.get());
  const std::uint32_t* s = pwt_sequence_data(seq.get());
  if (info.n != n || info.sigma != sigma) {
    std::printf("MISMATCH index has n=%llu sigma=%llu, corpus has n=%llu sigma=%llu\n",
                static_cast<unsigned long long>(info.n), static_cast<unsigned long long>(info.sigma),
                static_cast<unsigned long long>(n), static_cast<unsigned long long>(sigma));
    return kExitMismatch;
  }
  if (a.fault_inject) {
    std::uint64_t st = a.seed;
    const std::uint64_t pos = splitmix64(st);
    check(pwt_inject_fault(idx.get(), pos), "fault injection");
    std::printf("fault injected (position seed %llu)\n", static_cast<unsigned long long>(pos));
  }

  std::uint64_t lo = 0, hi = a.samples;
  if (a.probe >= 0) {
    lo = static_cast<std::uint64_t>(a.probe);
    hi = lo + 1;
  }
  std::uint64_t run = 0;
  for (std::uint64_t p = lo; p < hi; ++p, ++run) {
    const Probe q = make_probe(a.seed, p, s, n, sigma);
    const Answer want = oracle(q, s, n);
    const Answer got = ask(idx.get(), q);
    if (got.status != want.status || (want.status == PWT_OK && got.value != want.value)) {
      std::printf("MISMATCH seed=%llu probe=%llu %s expected=%s got=%s\n", static_cast<unsigned long long>(a.seed),
                  static_cast<unsigned long long>(p), describe(q).c_str(), show(want).c_str(), show(got).c_str());
      std::printf("reproduce: pwt verify --index %s %s --seed %llu --probe %llu%s\n", a.index.c_str(),
                  a.corpus.flags().c_str(), static_cast<unsigned long long>(a.seed),
                  static_cast<unsigned long long>(p), a.fault_inject ? " --fault-inject" : "");
      return kExitMismatch;
    }
  }
  std::printf("ok %llu probes, seed %llu\n", static_cast<unsigned long long>(run),
              static_cast<unsigned long long>(a.seed));
  return kExitOk;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  CorpusArgs corpus;
  std::vector<std::string> algos{"level", "sort", "msort", "packed"};
  std::vector<int> threads{1};
  unsigned reps = 3;
  unsigned d = 4;
  std::string csv = "-";
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

int run_bench(const BenchArgs& a) {
  auto seq = a.corpus.load();
  const auto n = static_cast<unsigned long long>(pwt_sequence_size(seq.get()));
  const auto sigma = static_cast<unsigned long long>(pwt_sequence_sigma(seq.get()));

  std::ofstream file;
  if (a.csv != "-") {
    file.open(a.csv);
    if (!file) throw Failure{kExitIo, "cannot write " + a.csv};
  }
  std::ostream& out = a.csv == "-" ? std::cout : file;
  out << "algo,phase,threads,n,sigma,reps,median_seconds,speedup\n";

  for (const auto& algo : a.algos) {
    // phase -> threads -> median
    std::map<std::string, std::map<int, double>> med;
    for (int t : a.threads) {
      pwt_set_threads(t);
      std::vector<double> build_t, dir_t;
      for (unsigned r = 0; r < a.reps; ++r) {
        pwt_index* raw = nullptr;
        auto t0 = Clock::now();
        check(pwt_build(seq.get(), algo.c_str(), a.d, 0, &raw), "build " + algo);
        build_t.push_back(seconds_since(t0));
        IndexPtr idx(raw);
        t0 = Clock::now();
        check(pwt_build_directories(idx.get()), "directories");
        dir_t.push_back(seconds_since(t0));
      }
      med["build"][t] = median(build_t);
      med["directories"][t] = median(dir_t);
    }
    for (const char* phase : {"build", "directories"}) {
      const auto& m = med[phase];
      for (int t : a.threads) {
        char line[256];
        std::snprintf(line, sizeof line, "%s,%s,%d,%llu,%llu,%u,%.6f,", algo.c_str(), phase, t, n, sigma, a.reps,
                      m.at(t));
        out << line;
        // blank when threads=1 was not measured
        if (auto base = m.find(1); base != m.end()) {
          std::snprintf(line, sizeof line, "%.3f", m.at(t) > 0 ? base->second / m.at(t) : 1.0);
          out << line;
        }
        out << "\n";
      }
    }
    out.flush();
  }
  return kExitOk;
}

// --- info ------------------------------------------------------------------

int run_info(const std::string& path) {
  auto idx = load_index(path);
  const auto info = info_of(idx.get());
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(path, ec);
  std::printf("kind             %s\n", pwt_kind_name(info.kind));
  std::printf("algorithm        %s\n", pwt_algorithm_name(info.algorithm));
  std::printf("n                %llu\n", static_cast<unsigned long long>(info.n));
  std::printf("sigma            %llu\n", static_cast<unsigned long long>(info.sigma));
  std::printf("levels           %u\n", info.levels);
  std::printf("arity            %u\n", info.arity);
  std::printf("nodes            %llu\n", static_cast<unsigned long long>(info.nodes));
  std::printf("bitmap_bits      %llu\n", static_cast<unsigned long long>(info.bitmap_bits));
  std::printf("directory_bits   %llu\n", static_cast<unsigned long long>(info.directory_bits));
  std::printf("file_bytes       %llu\n", static_cast<unsigned long long>(ec ? 0 : bytes));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel wavelet tree construction and queries"};
  app.require_subcommand(1);
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--threads", threads, "worker threads (default: hardware threads)")
      ->check(CLI::PositiveNumber);

  const std::vector<std::string> algos{"level", "sort", "msort", "packed", "huffman", "matrix", "multiary"};

  BuildArgs ba;
  auto* build = app.add_subcommand("build", "build an index from a corpus and write it");
  ba.corpus.add_to(build);
  build->add_option("--algo", ba.algo, "construction algorithm")->check(CLI::IsMember(algos));
  build->add_option("--d", ba.d, "arity for multiary (power of two, 2..256)");
  build->add_option("--out", ba.out, "index file")->required();
  build->add_flag("--no-store-dirs", ba.no_store_dirs, "omit rank/select directories; they are rebuilt on load");

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "answer one query: access I | rank C I | select C K");
  query->add_option("index", qa.index, "index file")->required();
  query->add_option("op", qa.op, "access, rank or select")->required()->check(CLI::IsMember({"access", "rank", "select"}));
  query->add_option("args", qa.args, "arguments");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "check random probes against a linear scan of the corpus");
  verify->add_option("--index", va.index, "index file")->required();
  va.corpus.add_to(verify);
  verify->add_option("--samples", va.samples, "number of probes");
  verify->add_option("--seed", va.seed, "probe seed");
  verify->add_option("--probe", va.probe, "run only this probe number");
  verify->add_flag("--fault-inject", va.fault_inject, "flip one stored bit after loading (testing)");

  BenchArgs be;
  auto* bench = app.add_subcommand("bench", "time builds over algorithms and thread counts, CSV out");
  be.corpus.add_to(bench);
  bench->add_option("--algos", be.algos, "comma-separated algorithms")->delimiter(',')->check(CLI::IsMember(algos));
  bench->add_option("--threads-list", be.threads, "comma-separated thread counts")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench->add_option("--reps", be.reps, "repetitions per cell; the median is reported")->check(CLI::PositiveNumber);
  bench->add_option("--d", be.d, "arity for multiary");
  bench->add_option("--csv", be.csv, "output file, - for stdout");

  std::string info_path;
  auto* info = app.add_subcommand("info", "print the header of an index file");
  info->add_option("index", info_path, "index file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    pwt_set_threads(threads);
    if (*build) return run_build(ba);
    if (*query) return run_query(qa);
    if (*verify) return run_verify(va);
    if (*bench) return run_bench(be);
    if (*info) return run_info(info_path);
  } catch (const Failure& f) {
    std::fprintf(stderr, "pwt: %s\n", f.message.c_str());
    return f.exit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pwt: %s\n", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
