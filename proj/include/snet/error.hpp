#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace snet {

enum class ErrorCode {
  kInvalidConfig,
  kMissingShare,
  kLengthMismatch,
  kInsufficientShares,
  kDuplicateIndex,
  kTooShort,
  kInsufficientCapacity,
  kMalformedLength,
  kMalformedImage,
  kIoFailure,
  kQuotaExceeded,
  kNotFound,
  kNotYetVisible,
  kAccessDenied,
  kUnknownPeer,
  kInvalidPath,
  kBackendUnavailable,
  kNotAppendOnly,
  kBaseMismatch,
  kVersionSkew,
  kReconstructionLengthMismatch,
  kDuplicateConversation,
  kManifestMissing,
  kCodeMismatch,
  kInvalidCode,
  kNotAMember,
  kInvalidArgument,
  kUnknownConversation,
  kCorruptState,
  kBindFailure,
  kConfigInvalid,
};

// Stable snake_case name, used in the daemon's error envelope and CLI output.
std::string_view error_code_name(ErrorCode code);
// Inverse of error_code_name; unknown names map to kIoFailure.
ErrorCode error_code_from_name(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace snet
