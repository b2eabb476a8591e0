#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace snet::sync {

enum class Role : std::uint8_t { kSending, kReceiving };

// Tracking record for one file d of a conversation. The share dᵢ on backend
// slot i lives at "<conv_token>/<rel_path>" on every backend.
struct SyncIndexEntry {
  std::string rel_path;
  Role role = Role::kReceiving;
  std::string owner;
  std::int64_t last_sync_time = 0;
  std::uint64_t last_plain_len = 0;
  std::uint64_t content_version = 0;
  std::uint32_t generation = 0;
  bool media = false;
  std::string prefix_digest;  // hex SHA-256 of the synced plaintext
  std::vector<std::uint64_t> last_versions;  // per slot, 0 = not seen
  std::vector<std::uint64_t> last_sizes;     // per slot object size

  bool operator==(const SyncIndexEntry&) const = default;
};

// Text file, one entry per line after the "snet-index 1" banner, fields
// tab-separated in this order:
//   rel_path role(S|R) owner last_sync_time last_plain_len content_version
//   generation media(0|1) prefix_digest versions(csv) sizes(csv)
class SyncIndex {
 public:
  static SyncIndex load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  const SyncIndexEntry* find(const std::string& rel_path) const;
  SyncIndexEntry* find(const std::string& rel_path);
  void put(SyncIndexEntry entry);
  void erase(const std::string& rel_path);

  const std::map<std::string, SyncIndexEntry>& entries() const { return entries_; }

 private:
  std::map<std::string, SyncIndexEntry> entries_;
};

}  // namespace snet::sync
