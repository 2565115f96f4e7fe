#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace beatsync {

enum class ErrorKind {
  kDegenerateRotation,
  kSequenceTooShort,
  kNoBeats,
  kRange,
  kShapeMismatch,
  kDomain,
  kInvalidInput,
  kParse,
  kNumericFailure,
};

std::string_view error_kind_name(ErrorKind kind);

/// Every failure raised by the library. `kind()` drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by forward kinematics; carries the offending frame and joint.
class DegenerateRotationError : public Error {
 public:
  DegenerateRotationError(const std::string& message, int frame, int joint)
      : Error(ErrorKind::kDegenerateRotation, message), frame_(frame), joint_(joint) {}

  int frame() const noexcept { return frame_; }
  int joint() const noexcept { return joint_; }

 private:
  int frame_;
  int joint_;
};

#define BEATSYNC_CHECK(cond, kind, msg)          \
  do {                                           \
    if (!(cond)) throw ::beatsync::Error(kind, msg); \
  } while (0)

}  // namespace beatsync
