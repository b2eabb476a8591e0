#include "snet/backend/sync_folder.hpp"

#include <chrono>

#include "snet/crypto.hpp"
#include "snet/error.hpp"

namespace snet::backend {

namespace fs = std::filesystem;

namespace {

bool is_temp_name(const std::string& name) {
  return name.empty() || name[0] == '.' || name.find(".tmp.") != std::string::npos;
}

std::int64_t mtime_ns(const fs::path& file) {
  std::error_code ec;
  auto t = fs::last_write_time(file, ec);
  if (ec) return 0;
  return std::chrono::duration_cast<std::chrono::nanoseconds>(t.time_since_epoch()).count();
}

}  // namespace

SyncFolderBackend::SyncFolderBackend(BackendHandle handle) : Backend(std::move(handle)), root_(this->handle().root) {
  if (!fs::is_directory(root_)) fail(ErrorCode::kIoFailure, "sync folder " + root_.string() + " does not exist");
}

RemoteEntry SyncFolderBackend::observe(const std::string& path, const fs::path& file, const Bytes* content) {
  std::error_code ec;
  const auto size = fs::file_size(file, ec);
  if (ec) fail(ErrorCode::kNotFound, path);
  const auto mt = mtime_ns(file);
  std::lock_guard lock(mu_);
  auto it = seen_.find(path);
  if (it != seen_.end() && it->second.size == size && it->second.mtime_ns == mt && !content) {
    return {path, size, mt / 1000000, it->second.version};
  }
  Bytes loaded;
  if (!content) {
    loaded = read_file(file);
    content = &loaded;
  }
  auto d = crypto::sha256(*content);
  std::string digest(d.begin(), d.end());
  if (it == seen_.end()) {
    it = seen_.emplace(path, Seen{size, mt, digest, 1}).first;
  } else {
    if (it->second.digest != digest) ++it->second.version;
    it->second.size = size;
    it->second.mtime_ns = mt;
    it->second.digest = digest;
  }
  return {path, size, mt / 1000000, it->second.version};
}

RemoteEntry SyncFolderBackend::do_put(const std::string& path, ByteView data) {
  const auto file = root_ / path;
  write_file_atomic(file, data);
  Bytes copy(data.begin(), data.end());
  return observe(path, file, &copy);
}

RangedRead SyncFolderBackend::do_get(const std::string& path, const std::vector<ByteRange>& ranges) {
  const auto file = root_ / path;
  if (!fs::is_regular_file(file)) fail(ErrorCode::kNotFound, path);
  auto data = read_file(file);
  auto entry = observe(path, file, &data);
  return {slice_ranges(data, ranges), entry};
}

std::vector<RemoteEntry> SyncFolderBackend::do_list(const std::string& prefix) {
  std::vector<RemoteEntry> out;
  const auto slash = prefix.rfind('/');
  const fs::path start = slash == std::string::npos ? root_ : root_ / prefix.substr(0, slash);
  std::error_code ec;
  if (!fs::is_directory(start, ec)) return out;
  for (auto it = fs::recursive_directory_iterator(start, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    const auto name = it->path().filename().string();
    if (is_temp_name(name)) {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    if (!it->is_regular_file()) continue;
    const auto rel = fs::relative(it->path(), root_).generic_string();
    if (rel.compare(0, prefix.size(), prefix) != 0) continue;
    try {
      out.push_back(observe(rel, it->path(), nullptr));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotFound) throw;  // vanished mid-scan
    }
  }
  if (ec) fail(ErrorCode::kIoFailure, "listing " + start.string() + ": " + ec.message());
  return out;
}

void SyncFolderBackend::do_delete(const std::string& path) {
  std::error_code ec;
  fs::remove(root_ / path, ec);
  if (ec) fail(ErrorCode::kIoFailure, "deleting " + path + ": " + ec.message());
  std::lock_guard lock(mu_);
  // Keep the counter so a re-created file continues the version sequence.
  if (auto it = seen_.find(path); it != seen_.end()) {
    it->second.digest.clear();
    it->second.mtime_ns = -1;
  }
}

void SyncFolderBackend::do_share(const std::string&, const std::string&) {}

}  // namespace snet::backend
