#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nucseg {

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kUnknownId,
  kWrongChannelCount,
  kInvalidClass,
  kBadMagic,
  kUnsupportedVersion,
  kUnsupportedDtype,
  kTruncatedHeader,
  kTruncatedPayload,
  kTrailingData,
  kValueOutOfRange,
  kMalformedRow,
  kPlacementFailure,
  kEmptyList,
  kEmptyGrid,
  kIoError,
  kConfigError,
};

/// Stable kebab-case name of an error code, used in CLI diagnostics.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nucseg
