#include "beatsync/error.h"

namespace beatsync {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateRotation: return "degenerate_rotation";
    case ErrorKind::kSequenceTooShort: return "sequence_too_short";
    case ErrorKind::kNoBeats: return "no_beats";
    case ErrorKind::kRange: return "range";
    case ErrorKind::kShapeMismatch: return "shape_mismatch";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kInvalidInput: return "invalid_input";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kNumericFailure: return "numeric_failure";
  }
  return "unknown";
}

}  // namespace beatsync
