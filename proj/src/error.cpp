#include "tailcheck/error.hpp"

namespace tailcheck {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArgument: return "argument";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kOverflow: return "overflow";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFit: return "fit";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kUndefinedFraction: return "undefined-fraction";
    case ErrorCode::kData: return "data";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace tailcheck
