#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clab {

enum class ErrorKind {
  NonIncreasingRadii,
  NonPositiveMeasure,
  UnknownRadius,
  NonPositiveConductance,
  NonPositiveWeight,
  DriftTooStrong,
  SpecDomainMismatch,
  NonPositiveTransformFunction,
  ShiftAboveBoxEigenvalue,
  NonPositiveKernel,
  ComplexPrincipalEigenvalue,
  SolverNoConvergence,
  InsufficientRadii,
  OrderViolation,
  NonPositiveInput,
  NotNormalized,
  ExponentOutOfRange,
  DegenerateTopEigenvalue,
  BoxMismatch,
  BoxTooLarge,
  NotContractive,
  ShiftOutsideLambdaSet,
  NotSubcritical,
  TailEmpty,
  ExclusionTooLarge,
  UnknownPreset,
  ParseError,
  SuiteDependencyUnmet,
  EmptyDirectory,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so that
/// callers (tests, the CLI) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace clab
