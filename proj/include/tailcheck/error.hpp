#pragma once

#include <stdexcept>
#include <string>

namespace tailcheck {

enum class ErrorCode {
  kArgument = 1,
  kShape,
  kFormat,
  kTruncated,
  kOverflow,
  kIo,
  kFit,
  kConfig,
  kUndefinedFraction,
  kData,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// C layer can translate it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace tailcheck
