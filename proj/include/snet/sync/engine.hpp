#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "snet/backend/backend.hpp"
#include "snet/clock.hpp"
#include "snet/codec/scheme.hpp"
#include "snet/random.hpp"
#include "snet/sync/classify.hpp"
#include "snet/sync/header.hpp"
#include "snet/sync/index.hpp"

namespace snet::sync {

inline constexpr std::string_view kManifestName = "manifest";

// "<16 hex>.log" and "media/<16 hex>-<name>" belong to the member named by
// the hex token; anything else is not a conversation file.
std::optional<std::string> owner_of(std::string_view rel_path);
bool is_media_path(std::string_view rel_path);

struct SyncContext {
  std::string conv_token;
  std::string self;
  std::set<std::string> members;
  codec::SchemeConfig scheme;
  Bytes conv_secret;
  std::vector<backend::Backend*> backends;  // slot order; size == scheme.shares()
  std::filesystem::path local_dir;          // D
  std::filesystem::path state_dir;          // index, local share copies, staged pushes
  const Clock* clock = nullptr;
  RandomSource* rnd = nullptr;
};

struct SyncAction {
  std::string path;
  Action action;
};

struct SyncReport {
  std::vector<SyncAction> actions;  // everything but IN_SYNC
  std::vector<std::string> waiting;
  std::vector<std::string> conflicts;
  std::vector<std::string> errors;
  std::uint64_t uploads = 0;    // share object puts
  std::uint64_t downloads = 0;  // share object gets
  std::uint64_t deletes = 0;
  std::uint64_t repairs = 0;    // re-puts of lagging or lost shares
  std::vector<std::string> received;  // files whose local copy changed

  std::uint64_t transfers() const { return uploads + downloads + deletes; }
};

// One device's view of one conversation. Not thread-safe: a single owner
// loop drives it.
class SyncEngine {
 public:
  explicit SyncEngine(SyncContext ctx);

  SyncReport sync_cycle();

  // Splits the delta and replaces every share object; the index entry is
  // returned updated only once enough puts succeeded. A rewrite re-splits the
  // whole file under a new generation.
  SyncIndexEntry push_sending(const SyncIndexEntry& entry, const Delta& delta, SyncReport& report,
                              bool rewrite = false);
  // Fetches and applies the unseen suffix of a receiving file.
  void pull_receiving(const std::string& rel_path, SyncReport& report);

  const SyncIndex& index() const { return index_; }
  const SyncContext& context() const { return ctx_; }
  std::filesystem::path index_file() const { return ctx_.state_dir / "index.v1"; }

 private:
  struct Probe {
    std::uint64_t remote_version = 0;
    std::uint64_t remote_size = 0;
    ShareFileHeader header;
    std::uint64_t offset = 0;  // payload offset the suffix starts at
    Bytes suffix;
  };
  struct Listing {
    bool available = false;
    std::map<std::string, backend::RemoteEntry> entries;  // rel path -> entry
  };

  std::string remote_path(const std::string& rel) const { return ctx_.conv_token + "/" + rel; }
  LocalFile local_state(const std::string& rel) const;
  std::filesystem::path local_copy(unsigned slot, const std::string& rel) const;
  std::filesystem::path pending_dir(const std::string& rel) const;
  std::uint64_t incremental_offset(const SyncIndexEntry* idx) const;

  void list_all();
  void note_put(unsigned slot, const std::string& rel, const backend::RemoteEntry& e);
  std::set<std::string> tracked_paths() const;
  void handle_sending(const std::string& rel, SyncReport& report);
  void handle_receiving(const std::string& rel, SyncReport& report);
  std::vector<ShareState> observe_shares(const std::string& rel, SyncReport& report);
  const Probe& probe(const std::string& rel, unsigned slot, std::uint64_t offset, SyncReport& report);

  struct Staged;
  Staged stage(const SyncIndexEntry& entry, const Delta& delta, bool rewrite);
  bool resume(Staged& staged, SyncReport& report);
  std::optional<Staged> load_staged(const std::string& rel) const;
  void repair(SyncIndexEntry& entry, SyncReport& report);
  void send_delete(const std::string& rel, SyncReport& report);
  Bytes object_for(const SyncIndexEntry& entry, unsigned slot) const;
  void guard_owner(const std::string& rel) const;
  void save_index();

  SyncContext ctx_;
  SyncIndex index_;
  std::vector<Listing> listings_;
  std::map<std::pair<std::string, unsigned>, Probe> probes_;
};

}  // namespace snet::sync
