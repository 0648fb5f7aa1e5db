#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zagff {

/// Failure categories surfaced by the library. The CLI maps these onto
/// machine-readable error kinds and exit codes.
enum class ErrorKind {
  kUnsupportedDimension,
  kInvalidArgument,
  kDimensionMismatch,
  kResourceExhausted,
  kStepBudgetExceeded,
  kNonConvergence,
  kEmptyRegion,
  kIo,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace zagff
