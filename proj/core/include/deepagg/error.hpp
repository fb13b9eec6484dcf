#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace deepagg {

enum class ErrorCode {
  InvalidArgument,
  MalformedFile,
  DimensionMismatch,
  NonFiniteValue,
  IoFailure,
  DuplicateId,
  MissingFile,
  DegenerateDescriptor,
  ModelDimMismatch,
  InsufficientSamples,
  EmptyPositives,
  MalformedGroundTruth,
  ZeroVariance,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status and batch jobs can report it per image.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace deepagg
