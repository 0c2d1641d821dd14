#include "mixserve/error.hpp"

namespace mixserve {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidProfile: return "invalid-profile";
    case ErrorKind::kProfileTooSmall: return "profile-too-small";
    case ErrorKind::kInvalidParams: return "invalid-params";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kInsufficientCapacity: return "insufficient-capacity";
    case ErrorKind::kUndefinedAccuracy: return "undefined-accuracy";
    case ErrorKind::kInstanceTooLarge: return "instance-too-large";
    case ErrorKind::kOrdering: return "ordering";
    case ErrorKind::kNoData: return "no-data";
    case ErrorKind::kInvalidTable: return "invalid-table";
    case ErrorKind::kNotConfigured: return "not-configured";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kNonContiguous: return "non-contiguous";
    case ErrorKind::kInvalidBounds: return "invalid-bounds";
    case ErrorKind::kTraceMismatch: return "trace-mismatch";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace mixserve
