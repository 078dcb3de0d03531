#include "conset/error.hpp"

namespace conset {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::EstimateUnavailable: return "EstimateUnavailable";
    case ErrorKind::RationalRatio: return "RationalRatio";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::NoScalingPair: return "NoScalingPair";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace conset
