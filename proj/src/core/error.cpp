#include "snet/error.hpp"

namespace snet {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kMissingShare: return "missing_share";
    case ErrorCode::kLengthMismatch: return "length_mismatch";
    case ErrorCode::kInsufficientShares: return "insufficient_shares";
    case ErrorCode::kDuplicateIndex: return "duplicate_index";
    case ErrorCode::kTooShort: return "too_short";
    case ErrorCode::kInsufficientCapacity: return "insufficient_capacity";
    case ErrorCode::kMalformedLength: return "malformed_length";
    case ErrorCode::kMalformedImage: return "malformed_image";
    case ErrorCode::kIoFailure: return "io_failure";
    case ErrorCode::kQuotaExceeded: return "quota_exceeded";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kNotYetVisible: return "not_yet_visible";
    case ErrorCode::kAccessDenied: return "access_denied";
    case ErrorCode::kUnknownPeer: return "unknown_peer";
    case ErrorCode::kInvalidPath: return "invalid_path";
    case ErrorCode::kBackendUnavailable: return "backend_unavailable";
    case ErrorCode::kNotAppendOnly: return "not_append_only";
    case ErrorCode::kBaseMismatch: return "base_mismatch";
    case ErrorCode::kVersionSkew: return "version_skew";
    case ErrorCode::kReconstructionLengthMismatch: return "reconstruction_length_mismatch";
    case ErrorCode::kDuplicateConversation: return "duplicate_conversation";
    case ErrorCode::kManifestMissing: return "manifest_missing";
    case ErrorCode::kCodeMismatch: return "code_mismatch";
    case ErrorCode::kInvalidCode: return "invalid_code";
    case ErrorCode::kNotAMember: return "not_a_member";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kUnknownConversation: return "unknown_conversation";
    case ErrorCode::kCorruptState: return "corrupt_state";
    case ErrorCode::kBindFailure: return "bind_failure";
    case ErrorCode::kConfigInvalid: return "config_invalid";
  }
  return "unknown";
}

ErrorCode error_code_from_name(std::string_view name) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::kConfigInvalid); ++c) {
    if (error_code_name(static_cast<ErrorCode>(c)) == name) return static_cast<ErrorCode>(c);
  }
  return ErrorCode::kIoFailure;
}

}  // namespace snet
