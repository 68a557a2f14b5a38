#include "chaowork/errors.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace chaowork {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoHit: return "NoHit";
    case ErrorKind::AmbiguousCorner: return "AmbiguousCorner";
    case ErrorKind::GrazingRay: return "GrazingRay";
    case ErrorKind::RejectionStall: return "RejectionStall";
    case ErrorKind::BounceLimitExceeded: return "BounceLimitExceeded";
    case ErrorKind::SampleFailureRate: return "SampleFailureRate";
    case ErrorKind::AsymmetricGrid: return "AsymmetricGrid";
    case ErrorKind::AliasingSuspect: return "AliasingSuspect";
    case ErrorKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TruncationDominates: return "TruncationDominates";
    case ErrorKind::DegenerateMean: return "DegenerateMean";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

void warn_once(std::string_view key, std::string_view message) {
  static std::mutex mutex;
  static std::set<std::string, std::less<>> seen;
  std::lock_guard lock(mutex);
  if (seen.find(key) != seen.end()) return;
  seen.emplace(key);
  std::cerr << "warning: " << message << '\n';
}

}  // namespace chaowork
