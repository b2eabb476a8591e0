#include "snet/backend/backend.hpp"

#include <algorithm>

#include "snet/backend/http_cloud.hpp"
#include "snet/backend/simulated.hpp"
#include "snet/backend/sync_folder.hpp"
#include "snet/error.hpp"

namespace snet::backend {

std::string_view backend_kind_name(BackendKind kind) {
  return kind == BackendKind::kSyncFolder ? "sync_folder" : "simulated";
}

BackendKind parse_backend_kind(std::string_view name) {
  if (name == "sync_folder" || name == "SYNC_FOLDER" || name == "folder") return BackendKind::kSyncFolder;
  if (name == "simulated" || name == "SIMULATED") return BackendKind::kSimulated;
  fail(ErrorCode::kInvalidArgument, "unknown backend kind '" + std::string(name) + "'");
}

void validate_path(std::string_view path) {
  if (path.empty() || path.front() == '/') fail(ErrorCode::kInvalidPath, "path must be relative: '" + std::string(path) + "'");
  if (path.find('\\') != std::string_view::npos || path.find('\0') != std::string_view::npos) {
    fail(ErrorCode::kInvalidPath, "illegal character in path");
  }
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    auto part = path.substr(start, end - start);
    if (part.empty() || part == "." || part == "..") {
      fail(ErrorCode::kInvalidPath, "bad path component in '" + std::string(path) + "'");
    }
    start = end + 1;
  }
}

std::vector<Bytes> slice_ranges(ByteView data, const std::vector<ByteRange>& ranges) {
  std::vector<Bytes> parts;
  parts.reserve(ranges.size());
  for (const auto& r : ranges) {
    const std::uint64_t lo = std::min<std::uint64_t>(r.offset, data.size());
    const std::uint64_t hi = r.length == kToEnd ? data.size() : std::min<std::uint64_t>(data.size(), lo + r.length);
    parts.emplace_back(data.begin() + lo, data.begin() + hi);
  }
  return parts;
}

RemoteEntry Backend::put_object(const std::string& path, ByteView data) {
  validate_path(path);
  auto e = do_put(path, data);
  ++puts_;
  up_ += data.size();
  return e;
}

std::pair<Bytes, RemoteEntry> Backend::get_object(const std::string& path) {
  auto r = get_ranges(path, {ByteRange{}});
  return {std::move(r.parts[0]), r.entry};
}

RangedRead Backend::get_ranges(const std::string& path, const std::vector<ByteRange>& ranges) {
  validate_path(path);
  auto r = do_get(path, ranges);
  ++gets_;
  for (const auto& p : r.parts) down_ += p.size();
  return r;
}

std::vector<RemoteEntry> Backend::list_objects(const std::string& prefix) {
  if (!prefix.empty()) validate_path(prefix.back() == '/' ? prefix.substr(0, prefix.size() - 1) : prefix);
  auto out = do_list(prefix);
  ++lists_;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  return out;
}

void Backend::delete_object(const std::string& path) {
  validate_path(path);
  do_delete(path);
  ++deletes_;
}

void Backend::share_directory(const std::string& prefix, const std::string& peer_account) {
  if (prefix.empty()) fail(ErrorCode::kInvalidPath, "empty share prefix");
  validate_path(prefix.back() == '/' ? prefix.substr(0, prefix.size() - 1) : prefix);
  do_share(prefix, peer_account);
}

TransferStats Backend::stats() const {
  return {puts_.load(), gets_.load(), lists_.load(), deletes_.load(), up_.load(), down_.load()};
}

void Backend::reset_stats() {
  puts_ = gets_ = lists_ = deletes_ = up_ = down_ = 0;
}

std::unique_ptr<Backend> open_backend(const BackendHandle& handle) {
  if (handle.kind == BackendKind::kSyncFolder) return std::make_unique<SyncFolderBackend>(handle);
  if (handle.root.rfind("http://", 0) == 0) return std::make_unique<HttpSimulatedBackend>(handle);
  return std::make_unique<SimulatedBackend>(handle, SimulatedCloud::open(handle.root));
}

}  // namespace snet::backend
