#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cavityduo {

enum class ErrorKind {
  // input / configuration
  ParseError,
  ValidationError,
  NegativeDiagonalRate,
  WeakCouplingInvalid,
  DegenerateCat,
  // numerical failure
  GridTooCoarse,
  FactorizationSingular,
  CutoffTooSmall,
  StepTooLarge,
  PositivityViolation,
  // physics tolerance exceeded
  TableMismatch,
  ToleranceExceeded,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Process exit status for an error class: 2 config, 3 physics tolerance, 4 numerical failure.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::NegativeDiagonalRate: return "NegativeDiagonalRate";
    case ErrorKind::WeakCouplingInvalid: return "WeakCouplingInvalid";
    case ErrorKind::DegenerateCat: return "DegenerateCat";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::FactorizationSingular: return "FactorizationSingular";
    case ErrorKind::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::PositivityViolation: return "PositivityViolation";
    case ErrorKind::TableMismatch: return "TableMismatch";
    case ErrorKind::ToleranceExceeded: return "ToleranceExceeded";
  }
  return "Unknown";
}

inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
    case ErrorKind::NegativeDiagonalRate:
    case ErrorKind::WeakCouplingInvalid:
    case ErrorKind::DegenerateCat:
      return 2;
    case ErrorKind::TableMismatch:
    case ErrorKind::ToleranceExceeded:
      return 3;
    case ErrorKind::GridTooCoarse:
    case ErrorKind::FactorizationSingular:
    case ErrorKind::CutoffTooSmall:
    case ErrorKind::StepTooLarge:
    case ErrorKind::PositivityViolation:
      return 4;
  }
  return 1;
}

}  // namespace cavityduo
