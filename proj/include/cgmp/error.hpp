#pragma once

#include <stdexcept>
#include <string>

namespace cgmp {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kFormat,
  kStartInCollision,
  kTargetInCollision,
  kNoGrasps,
  kValidation,
};

const char* to_string(ErrorKind kind);

// Every failure the library reports is an Error; the kind survives the trip
// through the C API as a status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cgmp
