#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "snet/bytes.hpp"

namespace snet::backend {

enum class BackendKind { kSyncFolder, kSimulated };

std::string_view backend_kind_name(BackendKind kind);
BackendKind parse_backend_kind(std::string_view name);

struct BackendHandle {
  std::string label;
  BackendKind kind = BackendKind::kSimulated;
  // Directory for SYNC_FOLDER; store id, or an http:// URL of a cloud
  // simulator, for SIMULATED.
  std::string root;
  std::string account;
};

struct RemoteEntry {
  std::string path;
  std::uint64_t size = 0;
  std::int64_t mtime_ms = 0;
  std::uint64_t version = 0;

  bool operator==(const RemoteEntry&) const = default;
};

inline constexpr std::uint64_t kToEnd = std::numeric_limits<std::uint64_t>::max();

struct ByteRange {
  std::uint64_t offset = 0;
  std::uint64_t length = kToEnd;
};

struct RangedRead {
  std::vector<Bytes> parts;  // one per requested range, clipped to the object
  RemoteEntry entry;
};

struct TransferStats {
  std::uint64_t puts = 0;
  std::uint64_t gets = 0;
  std::uint64_t lists = 0;
  std::uint64_t deletes = 0;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
};

// Rejects absolute paths, empty or dot components, backslashes and NULs.
void validate_path(std::string_view path);

class Backend {
 public:
  explicit Backend(BackendHandle handle) : handle_(std::move(handle)) {}
  virtual ~Backend() = default;
  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  const BackendHandle& handle() const { return handle_; }

  RemoteEntry put_object(const std::string& path, ByteView data);
  std::pair<Bytes, RemoteEntry> get_object(const std::string& path);
  // Several byte ranges of one object in a single request.
  RangedRead get_ranges(const std::string& path, const std::vector<ByteRange>& ranges);
  std::vector<RemoteEntry> list_objects(const std::string& prefix);
  void delete_object(const std::string& path);
  void share_directory(const std::string& prefix, const std::string& peer_account);

  TransferStats stats() const;
  void reset_stats();

 protected:
  virtual RemoteEntry do_put(const std::string& path, ByteView data) = 0;
  virtual RangedRead do_get(const std::string& path, const std::vector<ByteRange>& ranges) = 0;
  virtual std::vector<RemoteEntry> do_list(const std::string& prefix) = 0;
  virtual void do_delete(const std::string& path) = 0;
  virtual void do_share(const std::string& prefix, const std::string& peer_account) = 0;

 private:
  BackendHandle handle_;
  std::atomic<std::uint64_t> puts_{0}, gets_{0}, lists_{0}, deletes_{0}, up_{0}, down_{0};
};

// Clips `ranges` against `data`.
std::vector<Bytes> slice_ranges(ByteView data, const std::vector<ByteRange>& ranges);

std::unique_ptr<Backend> open_backend(const BackendHandle& handle);

}  // namespace snet::backend
