#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sccs {

enum class ErrorCode {
  // core_model
  BadMagic,
  TruncatedFile,
  NonFiniteValue,
  TrailingData,
  IoFailure,
  InvalidMatrix,
  GapDetected,
  OverlapDetected,
  EmptySegment,
  ManifestInvalid,
  RowCountMismatch,
  // ot_align
  DimMismatch,
  ZeroNormRow,
  ZeroSize,
  InvalidConfig,
  InvalidMarginals,
  NumericalUnderflow,
  DivisionUnderflow,
  TooLarge,
  EmptyCandidateSet,
  // segmentation
  IndexOutOfRange,
  TooFewSentences,
  // summarize
  WeightSumViolation,
  TopKTooLarge,
  BadBinCount,
  FrameTooSmall,
  KTooLarge,
  // metrics
  NoPositives,
  BadK,
  ZeroNorm,
  // cli_io
  BadHeader,
  DepthUnsupported,
};

std::string_view error_code_name(ErrorCode code);

// Every recoverable failure in the library is reported as an Error carrying a
// machine-checkable code; what() starts with the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sccs
