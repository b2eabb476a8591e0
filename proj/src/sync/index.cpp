#include "snet/sync/index.hpp"

#include <sstream>

#include "snet/bytes.hpp"
#include "snet/error.hpp"

namespace snet::sync {

namespace {

constexpr std::string_view kBanner = "snet-index 1";

std::string join(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out.empty() ? "-" : out;
}

std::vector<std::uint64_t> split_csv(const std::string& s) {
  std::vector<std::uint64_t> out;
  if (s == "-") return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

SyncIndex SyncIndex::load(const std::filesystem::path& file) {
  SyncIndex idx;
  if (!std::filesystem::exists(file)) return idx;
  std::stringstream in(to_string(read_file(file)));
  std::string line;
  if (!std::getline(in, line) || line != kBanner) fail(ErrorCode::kCorruptState, "bad index banner in " + file.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 11 || (f[1] != "S" && f[1] != "R")) fail(ErrorCode::kCorruptState, "bad index line: " + line);
    try {
      SyncIndexEntry e;
      e.rel_path = f[0];
      e.role = f[1] == "S" ? Role::kSending : Role::kReceiving;
      e.owner = f[2];
      e.last_sync_time = std::stoll(f[3]);
      e.last_plain_len = std::stoull(f[4]);
      e.content_version = std::stoull(f[5]);
      e.generation = static_cast<std::uint32_t>(std::stoul(f[6]));
      e.media = f[7] == "1";
      e.prefix_digest = f[8] == "-" ? "" : f[8];
      e.last_versions = split_csv(f[9]);
      e.last_sizes = split_csv(f[10]);
      idx.put(std::move(e));
    } catch (const std::logic_error&) {
      fail(ErrorCode::kCorruptState, "bad index line: " + line);
    }
  }
  return idx;
}

void SyncIndex::save(const std::filesystem::path& file) const {
  std::string out(kBanner);
  out += '\n';
  for (const auto& [path, e] : entries_) {
    out += e.rel_path + '\t' + (e.role == Role::kSending ? "S" : "R") + '\t' + e.owner + '\t' +
           std::to_string(e.last_sync_time) + '\t' + std::to_string(e.last_plain_len) + '\t' +
           std::to_string(e.content_version) + '\t' + std::to_string(e.generation) + '\t' + (e.media ? "1" : "0") +
           '\t' + (e.prefix_digest.empty() ? "-" : e.prefix_digest) + '\t' + join(e.last_versions) + '\t' +
           join(e.last_sizes) + '\n';
  }
  write_file_atomic(file, to_bytes(out));
}

const SyncIndexEntry* SyncIndex::find(const std::string& rel_path) const {
  auto it = entries_.find(rel_path);
  return it == entries_.end() ? nullptr : &it->second;
}

SyncIndexEntry* SyncIndex::find(const std::string& rel_path) {
  auto it = entries_.find(rel_path);
  return it == entries_.end() ? nullptr : &it->second;
}

void SyncIndex::put(SyncIndexEntry entry) {
  auto key = entry.rel_path;
  entries_[key] = std::move(entry);
}

void SyncIndex::erase(const std::string& rel_path) { entries_.erase(rel_path); }

}  // namespace snet::sync
