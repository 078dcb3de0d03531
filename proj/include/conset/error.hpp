#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace conset {

enum class ErrorKind {
  InvalidInput,
  PreconditionFailed,
  NumericalFailure,
  InternalInconsistency,
  EstimateUnavailable,
  RationalRatio,
  BudgetExhausted,
  NoScalingPair,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// PreconditionFailed raised by homogenize_shift carries the residual norm.
class ResidualError : public Error {
 public:
  ResidualError(const std::string& what, double residual)
      : Error(ErrorKind::PreconditionFailed, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace conset
