#include "nucseg/error.hpp"

namespace nucseg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kUnknownId: return "unknown-id";
    case ErrorCode::kWrongChannelCount: return "wrong-channel-count";
    case ErrorCode::kInvalidClass: return "invalid-class";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kUnsupportedDtype: return "unsupported-dtype";
    case ErrorCode::kTruncatedHeader: return "truncated-header";
    case ErrorCode::kTruncatedPayload: return "truncated-payload";
    case ErrorCode::kTrailingData: return "trailing-data";
    case ErrorCode::kValueOutOfRange: return "value-out-of-range";
    case ErrorCode::kMalformedRow: return "malformed-row";
    case ErrorCode::kPlacementFailure: return "placement-failure";
    case ErrorCode::kEmptyList: return "empty-list";
    case ErrorCode::kEmptyGrid: return "empty-grid";
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kConfigError: return "config-error";
  }
  return "unknown";
}

}  // namespace nucseg
