#pragma once

#include <filesystem>
#include <map>
#include <mutex>

#include "snet/backend/backend.hpp"

namespace snet::backend {

// A directory kept in sync by a provider's own desktop client. Only local
// file operations are issued. Versions are synthesized per process from a
// (size, mtime, content hash) fingerprint; share_directory is a no-op since
// sharing happens in the provider's app.
class SyncFolderBackend final : public Backend {
 public:
  explicit SyncFolderBackend(BackendHandle handle);

 protected:
  RemoteEntry do_put(const std::string& path, ByteView data) override;
  RangedRead do_get(const std::string& path, const std::vector<ByteRange>& ranges) override;
  std::vector<RemoteEntry> do_list(const std::string& prefix) override;
  void do_delete(const std::string& path) override;
  void do_share(const std::string& prefix, const std::string& peer_account) override;

 private:
  struct Seen {
    std::uint64_t size;
    std::int64_t mtime_ns;
    std::string digest;
    std::uint64_t version;
  };

  RemoteEntry observe(const std::string& path, const std::filesystem::path& file, const Bytes* content);

  std::filesystem::path root_;
  std::mutex mu_;
  std::map<std::string, Seen> seen_;
};

}  // namespace snet::backend
