#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chaowork {

enum class ErrorKind {
  NoHit,
  AmbiguousCorner,
  GrazingRay,
  RejectionStall,
  BounceLimitExceeded,
  SampleFailureRate,
  AsymmetricGrid,
  AliasingSuspect,
  QuadratureNonConvergence,
  GridTooCoarse,
  ConvergenceFailure,
  DimensionMismatch,
  TruncationDominates,
  DegenerateMean,
  GridMismatch,
  ParseError,
  RangeError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Emits a warning on stderr the first time a given key is seen in this process.
void warn_once(std::string_view key, std::string_view message);

}  // namespace chaowork
