#pragma once

#include <stdexcept>
#include <string>

namespace bbspline {

enum class ErrorCode {
  kUnsupportedOrder,
  kInvalidPenalty,
  kTooFewPoints,
  kDimensionMismatch,
  kDegenerateRange,
  kDegenerateVariance,
  kInvalidArgument,
  kConfiguration,
  kIo,
  kParse,
};

const char* to_string(ErrorCode code) noexcept;

// Every library failure is reported through this type; callers that care
// about the category switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bbspline
