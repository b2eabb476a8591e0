#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "snet/backend/backend.hpp"
#include "snet/clock.hpp"
#include "snet/codec/scheme.hpp"
#include "snet/conv/invitation.hpp"
#include "snet/conv/manifest.hpp"
#include "snet/conv/record.hpp"
#include "snet/random.hpp"
#include "snet/sync/engine.hpp"

namespace snet::conv {

// Random 64-bit member token as 16 lowercase hex digits.
bool is_member_token(std::string_view token);
std::string new_member_token(RandomSource& rnd);

// One device: its member token and the storage accounts it can reach.
// Lives in <data_dir>/device.json; conversations under <data_dir>/conversations.
class Device {
 public:
  static Device init(const std::filesystem::path& data_dir, RandomSource& rnd);
  // kConfigInvalid when the directory was never initialised.
  static Device open(const std::filesystem::path& data_dir);

  const std::filesystem::path& data_dir() const { return data_dir_; }
  const std::string& member_token() const { return token_; }
  const std::vector<backend::BackendHandle>& backends() const { return backends_; }
  // kConfigInvalid for an unknown label.
  const backend::BackendHandle& backend(const std::string& label) const;
  // Adds or replaces by label and persists. An empty account defaults to the
  // member token.
  void add_backend(backend::BackendHandle handle);

  std::filesystem::path conversation_dir(const std::string& conv_token) const;
  std::vector<std::string> conversations() const;

 private:
  void save() const;

  std::filesystem::path data_dir_;
  std::string token_;
  std::vector<backend::BackendHandle> backends_;
};

struct Env {
  const Clock* clock = nullptr;
  RandomSource* rnd = nullptr;
};
// Wall clock and the OS-backed generator.
Env system_env();

// A member as the creator knows them: token plus the storage account their
// shares are granted to ("token@account"; account defaults to the token).
struct MemberSpec {
  std::string token;
  std::string account;
};
MemberSpec parse_member_spec(std::string_view text);

struct ConversationConfig {
  std::string conv_token;
  std::string self;
  std::vector<std::string> members;  // sorted, includes self
  codec::SchemeConfig scheme;
  Bytes conv_secret;
  std::vector<std::string> backend_labels;  // slot order
  std::int64_t created_ms = 0;
};

// Position in the merged message order.
struct Cursor {
  std::int64_t timestamp_ms = -1;
  std::string sender;
  std::uint64_t seq = 0;

  auto operator<=>(const Cursor&) const = default;
  std::string encode() const;  // "<ts>.<sender>.<seq>"
  static Cursor parse(std::string_view text);  // empty text is the start
};

struct Message {
  std::string sender;
  std::uint64_t seq = 0;  // index within the sender's log
  MessageRecord record;

  Cursor cursor() const { return {record.timestamp_ms, sender, seq}; }
};

class Conversation {
 public:
  Conversation(const Device& device, ConversationConfig config, Env env);
  // Loads <data_dir>/conversations/<token>; kUnknownConversation if absent.
  static std::unique_ptr<Conversation> open(const Device& device, const std::string& conv_token, Env env);

  const ConversationConfig& config() const { return config_; }
  const std::filesystem::path& local_dir() const { return local_dir_; }

  // Appends to this member's log. MEDIA_REF takes the media bytes, stores
  // them as an immutable file under media/ and logs its relative path.
  MessageRecord append_message(ContentType type, ByteView body, std::optional<std::int64_t> now_ms = {});

  // All members' logs merged by (timestamp, sender, seq).
  std::vector<Message> read_messages(const Cursor& after = {}) const;
  std::vector<Message> read_messages_since(std::int64_t since_ms) const;
  // kNotFound until the media file has been received.
  Bytes read_media(const std::string& rel_path) const;

  sync::SyncReport sync();
  std::optional<sync::SyncReport> last_report() const;
  std::vector<backend::Backend*> backends() const;
  // Persists the config, secrets included, with owner-only permissions.
  void write_config() const;

 private:
  ConversationConfig config_;
  std::filesystem::path dir_;
  std::filesystem::path local_dir_;
  Env env_;
  std::vector<std::unique_ptr<backend::Backend>> backends_;
  std::unique_ptr<sync::SyncEngine> engine_;
  mutable std::mutex engine_mutex_;  // appends and sync cycles share one writer
  std::int64_t last_own_ts_ = 0;
  std::optional<sync::SyncReport> last_report_;
};

struct Created {
  std::unique_ptr<Conversation> conversation;
  std::string invitation_code;
};

// Writes the manifest XOR-shared to every backend, grants each other member
// access and returns the invitation for out-of-band delivery.
Created create_conversation(const Device& device, const std::vector<MemberSpec>& members,
                            const codec::SchemeConfig& scheme, const std::vector<std::string>& backend_labels,
                            Env env);

// Fetches and checks the manifest, then pulls the existing logs.
// kManifestMissing while any manifest share is unreadable; kCodeMismatch when
// manifest and code disagree; kNotAMember when this device is not listed.
std::unique_ptr<Conversation> join_conversation(const Device& device, std::string_view code, Env env);

}  // namespace snet::conv
