#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace satrep {

enum class ErrorCode {
  NonHermitian,
  NoConvergence,
  NotPSD,
  NotEffect,
  DimMismatch,
  PartialMap,
  LabelMismatch,
  NotStochastic,
  UnknownOutcome,
  CapExceeded,
  BadDimension,
  ObservableMismatch,
  InvalidPovm,
  InvalidInstrument,
  InvalidState,
  LPNumericalFailure,
  NotNormalized,
  OutOfRange,
  NonBinaryLabels,
  AtomsTooClose,
  NumericalUnderflow,
  ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when |Ω|^n would exceed the enumeration cap.
class CapExceededError : public Error {
 public:
  CapExceededError(std::size_t required, std::size_t cap)
      : Error(ErrorCode::CapExceeded, "enumeration needs " + std::to_string(required) +
                                          " outcomes, cap is " + std::to_string(cap)),
        required_(required) {}

  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

}  // namespace satrep
