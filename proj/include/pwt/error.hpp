#pragma once

#include <stdexcept>
#include <string>

namespace pwt {

enum class ErrorCode {
  kInvalidArgument = 1,
  kSymbolOutOfRange,
  kOutOfRange,
  kNoSuchOccurrence,
  kOverflow,
  kIo,
  kFormat,
  kChecksum,
  kDecode,
};

// Single exception type for the library. The C API maps `code()` onto
// pwt_status values one-to-one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace pwt
