#include "bbspline/error.hpp"

namespace bbspline {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kUnsupportedOrder:
      return "unsupported-order";
    case ErrorCode::kInvalidPenalty:
      return "invalid-penalty";
    case ErrorCode::kTooFewPoints:
      return "too-few-points";
    case ErrorCode::kDimensionMismatch:
      return "dimension-mismatch";
    case ErrorCode::kDegenerateRange:
      return "degenerate-range";
    case ErrorCode::kDegenerateVariance:
      return "degenerate-variance";
    case ErrorCode::kInvalidArgument:
      return "invalid-argument";
    case ErrorCode::kConfiguration:
      return "configuration";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kParse:
      return "parse";
  }
  return "unknown";
}

}  // namespace bbspline
