#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmelimit {

enum class ErrorKind {
  InvalidArgument,
  NegativeDensity,
  DimensionUnsupported,
  KernelUnbounded,
  CflViolation,
  PositivityLoss,
  NonFiniteField,
  SupportTouchesBoundary,
  ConfigInvalid,
  IoFailure,
  FormatMismatch,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  // True for failures of the numerics (as opposed to bad input or I/O).
  [[nodiscard]] bool is_numerical() const noexcept {
    switch (kind_) {
      case ErrorKind::NegativeDensity:
      case ErrorKind::KernelUnbounded:
      case ErrorKind::CflViolation:
      case ErrorKind::PositivityLoss:
      case ErrorKind::NonFiniteField:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace pmelimit
