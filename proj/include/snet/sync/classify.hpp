#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "snet/bytes.hpp"
#include "snet/sync/index.hpp"

namespace snet::sync {

enum class Action {
  kSendCreate,
  kSendUpdate,
  kSendDelete,
  kRecvCreate,
  kRecvUpdate,
  kRecvDelete,
  kInSync,
  kWaiting,
  kConflict,
};

std::string_view action_name(Action a);

struct LocalFile {
  bool exists = false;
  std::uint64_t length = 0;
};

// What one backend slot says about dᵢ. Unknown = the backend could not be
// asked this cycle.
struct ShareState {
  enum Presence : std::uint8_t { kAbsent, kPresent, kUnknown };
  Presence presence = kAbsent;
  std::uint64_t content_version = 0;

  static ShareState absent() { return {kAbsent, 0}; }
  static ShareState unknown() { return {kUnknown, 0}; }
  static ShareState at(std::uint64_t v) { return {kPresent, v}; }
};

// Total and single-valued. `required` is k for XOR/ADDITIVE and t for SHAMIR;
// a receiving file proceeds once `required` present shares agree on the
// newest content version, so SHAMIR tolerates up to n - t lagging or lost
// shares while XOR/ADDITIVE wait for all k.
Action classify(Role role, const LocalFile& local, const std::vector<ShareState>& shares, unsigned required,
                const SyncIndexEntry* idx);

struct Delta {
  std::uint64_t base_len = 0;
  Bytes appended;
};

// Throws kNotAppendOnly when new_content is shorter than old_len or, given
// the hex SHA-256 of the synced prefix, its first old_len bytes differ.
Delta compute_delta(std::uint64_t old_len, ByteView new_content, std::string_view prefix_digest = {});

std::string digest_hex(ByteView data);

}  // namespace snet::sync
