#include "snet/sync/classify.hpp"

#include <algorithm>

#include "snet/crypto.hpp"
#include "snet/error.hpp"

namespace snet::sync {

std::string_view action_name(Action a) {
  switch (a) {
    case Action::kSendCreate: return "SEND_CREATE";
    case Action::kSendUpdate: return "SEND_UPDATE";
    case Action::kSendDelete: return "SEND_DELETE";
    case Action::kRecvCreate: return "RECV_CREATE";
    case Action::kRecvUpdate: return "RECV_UPDATE";
    case Action::kRecvDelete: return "RECV_DELETE";
    case Action::kInSync: return "IN_SYNC";
    case Action::kWaiting: return "WAITING";
    case Action::kConflict: return "CONFLICT";
  }
  return "?";
}

namespace {

Action classify_sending(const LocalFile& local, const SyncIndexEntry* idx) {
  if (!idx) return local.exists ? Action::kSendCreate : Action::kInSync;
  if (!local.exists) return Action::kSendDelete;
  if (local.length > idx->last_plain_len) return Action::kSendUpdate;
  if (local.length < idx->last_plain_len) return Action::kConflict;
  return Action::kInSync;
}

Action classify_receiving(const LocalFile& local, const std::vector<ShareState>& shares, unsigned required,
                          const SyncIndexEntry* idx) {
  std::size_t present = 0, absent = 0;
  std::uint64_t newest = 0;
  for (const auto& s : shares) {
    if (s.presence == ShareState::kPresent) {
      ++present;
      newest = std::max(newest, s.content_version);
    } else if (s.presence == ShareState::kAbsent) {
      ++absent;
    }
  }
  if (present == 0) {
    if (absent == shares.size()) return local.exists ? Action::kRecvDelete : Action::kInSync;
    return local.exists || idx ? Action::kWaiting : Action::kInSync;
  }
  const auto agreeing = std::count_if(shares.begin(), shares.end(), [&](const ShareState& s) {
    return s.presence == ShareState::kPresent && s.content_version == newest;
  });
  if (agreeing < static_cast<std::ptrdiff_t>(required)) return Action::kWaiting;
  if (!local.exists || !idx) return Action::kRecvCreate;
  if (newest > idx->content_version) return Action::kRecvUpdate;
  if (newest < idx->content_version) return Action::kWaiting;
  // Current version already applied; restore a locally damaged copy.
  return local.length == idx->last_plain_len ? Action::kInSync : Action::kRecvCreate;
}

}  // namespace

Action classify(Role role, const LocalFile& local, const std::vector<ShareState>& shares, unsigned required,
                const SyncIndexEntry* idx) {
  return role == Role::kSending ? classify_sending(local, idx) : classify_receiving(local, shares, required, idx);
}

std::string digest_hex(ByteView data) {
  auto d = crypto::sha256(data);
  return hex_encode(d);
}

Delta compute_delta(std::uint64_t old_len, ByteView new_content, std::string_view prefix_digest) {
  if (new_content.size() < old_len) {
    fail(ErrorCode::kNotAppendOnly, "file shrank from " + std::to_string(old_len) + " to " +
                                        std::to_string(new_content.size()) + " bytes");
  }
  if (!prefix_digest.empty() && digest_hex(new_content.first(old_len)) != prefix_digest) {
    fail(ErrorCode::kNotAppendOnly, "synced prefix was modified");
  }
  return {old_len, Bytes(new_content.begin() + old_len, new_content.end())};
}

}  // namespace snet::sync
