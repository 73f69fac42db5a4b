#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thirdform {

enum class ErrorCode {
  RankDeficient,
  NullVector,
  DimensionMismatch,
  NotSymmetric,
  NotBilinear,
  DegenerateFamily,
  NotUmbilicalThirdForm,
  AdaptednessViolated,
  UnequalHalfDimensions,
  NonConstantRho,
  InvalidParams,
  NotFlat,
  OutOfDomain,
  StepTooLarge,
  MissingRicci,
  NotOnQuadric,
  UnknownName,
  BadParams,
  CurvatureSumZero,
  SignatureMismatch,
  BadCurvature,
  CodimensionUnsupported,
  SamplingFailed,
  ConfigParse,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. The code is stable and is what the
/// CLI maps to diagnostics; the message carries the numeric detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace thirdform
