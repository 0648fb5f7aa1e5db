#include "zagff/error.hpp"

namespace zagff {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kUnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kResourceExhausted: return "resource-exhausted";
    case ErrorKind::kStepBudgetExceeded: return "step-budget-exceeded";
    case ErrorKind::kNonConvergence: return "non-convergence";
    case ErrorKind::kEmptyRegion: return "empty-region";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace zagff
