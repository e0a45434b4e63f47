#include "clab/errors.hpp"

namespace clab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonIncreasingRadii: return "NonIncreasingRadii";
    case ErrorKind::NonPositiveMeasure: return "NonPositiveMeasure";
    case ErrorKind::UnknownRadius: return "UnknownRadius";
    case ErrorKind::NonPositiveConductance: return "NonPositiveConductance";
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::DriftTooStrong: return "DriftTooStrong";
    case ErrorKind::SpecDomainMismatch: return "SpecDomainMismatch";
    case ErrorKind::NonPositiveTransformFunction: return "NonPositiveTransformFunction";
    case ErrorKind::ShiftAboveBoxEigenvalue: return "ShiftAboveBoxEigenvalue";
    case ErrorKind::NonPositiveKernel: return "NonPositiveKernel";
    case ErrorKind::ComplexPrincipalEigenvalue: return "ComplexPrincipalEigenvalue";
    case ErrorKind::SolverNoConvergence: return "SolverNoConvergence";
    case ErrorKind::InsufficientRadii: return "InsufficientRadii";
    case ErrorKind::OrderViolation: return "OrderViolation";
    case ErrorKind::NonPositiveInput: return "NonPositiveInput";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorKind::DegenerateTopEigenvalue: return "DegenerateTopEigenvalue";
    case ErrorKind::BoxMismatch: return "BoxMismatch";
    case ErrorKind::BoxTooLarge: return "BoxTooLarge";
    case ErrorKind::NotContractive: return "NotContractive";
    case ErrorKind::ShiftOutsideLambdaSet: return "ShiftOutsideLambdaSet";
    case ErrorKind::NotSubcritical: return "NotSubcritical";
    case ErrorKind::TailEmpty: return "TailEmpty";
    case ErrorKind::ExclusionTooLarge: return "ExclusionTooLarge";
    case ErrorKind::UnknownPreset: return "UnknownPreset";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SuiteDependencyUnmet: return "SuiteDependencyUnmet";
    case ErrorKind::EmptyDirectory: return "EmptyDirectory";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace clab
