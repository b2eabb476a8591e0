#include "snet/sync/engine.hpp"

#include <algorithm>

#include "snet/codec/sharing.hpp"
#include "snet/error.hpp"

namespace snet::sync {

namespace fs = std::filesystem;

namespace {

bool is_hex_token(std::string_view s) {
  return s.size() == 16 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

bool is_temp_name(const std::string& name) {
  return name.empty() || name[0] == '.' || name.find(".tmp.") != std::string::npos;
}

Bytes read_prefix(const fs::path& file, std::uint64_t len) {
  if (len == 0) return {};
  auto data = read_file(file);
  if (data.size() < len) fail(ErrorCode::kBaseMismatch, file.string() + " is shorter than its synced prefix");
  data.resize(len);
  return data;
}

}  // namespace

std::optional<std::string> owner_of(std::string_view rel_path) {
  if (rel_path.size() == 20 && rel_path.substr(16) == ".log" && is_hex_token(rel_path.substr(0, 16))) {
    return std::string(rel_path.substr(0, 16));
  }
  if (rel_path.rfind("media/", 0) == 0) {
    auto name = rel_path.substr(6);
    if (name.size() > 17 && name[16] == '-' && is_hex_token(name.substr(0, 16)) &&
        name.find('/') == std::string_view::npos) {
      return std::string(name.substr(0, 16));
    }
  }
  return std::nullopt;
}

bool is_media_path(std::string_view rel_path) { return rel_path.rfind("media/", 0) == 0; }

struct SyncEngine::Staged {
  SyncIndexEntry entry;        // as it becomes after commit; last_versions[i] > 0 marks slot i done
  std::vector<Bytes> objects;  // full share objects, header included
};

SyncEngine::SyncEngine(SyncContext ctx) : ctx_(std::move(ctx)) {
  ctx_.scheme.validate();
  if (ctx_.backends.size() != ctx_.scheme.shares()) {
    fail(ErrorCode::kInvalidConfig, "scheme needs " + std::to_string(ctx_.scheme.shares()) + " backends, got " +
                                        std::to_string(ctx_.backends.size()));
  }
  if (!ctx_.clock || !ctx_.rnd) fail(ErrorCode::kInvalidArgument, "sync context needs a clock and a random source");
  fs::create_directories(ctx_.local_dir);
  fs::create_directories(ctx_.state_dir);
  index_ = SyncIndex::load(index_file());
}

LocalFile SyncEngine::local_state(const std::string& rel) const {
  std::error_code ec;
  const auto file = ctx_.local_dir / rel;
  if (!fs::is_regular_file(file, ec)) return {};
  return {true, fs::file_size(file, ec)};
}

fs::path SyncEngine::local_copy(unsigned slot, const std::string& rel) const {
  return ctx_.state_dir / "shares" / std::to_string(slot) / rel;
}

fs::path SyncEngine::pending_dir(const std::string& rel) const {
  return ctx_.state_dir / "pending" / hex_encode(to_bytes(rel));
}

std::uint64_t SyncEngine::incremental_offset(const SyncIndexEntry* idx) const {
  if (!idx || idx->content_version == 0) return 0;
  return ctx_.scheme.full_blocks(idx->last_plain_len) * ctx_.scheme.element_width();
}

void SyncEngine::save_index() { index_.save(index_file()); }

void SyncEngine::guard_owner(const std::string& rel) const {
  if (owner_of(rel) != ctx_.self) {
    fail(ErrorCode::kAccessDenied, "single-writer violation: " + rel + " is not owned by this member");
  }
}

void SyncEngine::list_all() {
  listings_.assign(ctx_.backends.size(), {});
  const std::string prefix = ctx_.conv_token + "/";
  for (std::size_t slot = 0; slot < ctx_.backends.size(); ++slot) {
    try {
      for (auto& e : ctx_.backends[slot]->list_objects(prefix)) {
        listings_[slot].entries.emplace(e.path.substr(prefix.size()), e);
      }
      listings_[slot].available = true;
    } catch (const Error&) {
      listings_[slot].entries.clear();
    }
  }
}

void SyncEngine::note_put(unsigned slot, const std::string& rel, const backend::RemoteEntry& e) {
  if (slot < listings_.size() && listings_[slot].available) listings_[slot].entries[rel] = e;
}

std::set<std::string> SyncEngine::tracked_paths() const {
  std::set<std::string> out;
  auto consider = [&](const std::string& rel) {
    auto owner = owner_of(rel);
    if (owner && ctx_.members.count(*owner)) out.insert(rel);
  };
  for (const auto& [rel, e] : index_.entries()) out.insert(rel);
  std::error_code ec;
  if (fs::is_directory(ctx_.local_dir, ec)) {
    for (auto it = fs::recursive_directory_iterator(ctx_.local_dir, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
      if (is_temp_name(it->path().filename().string()) || !it->is_regular_file()) continue;
      consider(fs::relative(it->path(), ctx_.local_dir).generic_string());
    }
  }
  for (const auto& l : listings_) {
    for (const auto& [rel, e] : l.entries) consider(rel);
  }
  const auto pending_root = ctx_.state_dir / "pending";
  if (fs::is_directory(pending_root, ec)) {
    for (const auto& d : fs::directory_iterator(pending_root, ec)) {
      try {
        consider(to_string(hex_decode(d.path().filename().string())));
      } catch (const Error&) {
      }
    }
  }
  return out;
}

SyncReport SyncEngine::sync_cycle() {
  SyncReport report;
  list_all();
  for (std::size_t slot = 0; slot < listings_.size(); ++slot) {
    if (!listings_[slot].available) {
      report.errors.push_back("backend " + ctx_.backends[slot]->handle().label + " unavailable");
    }
  }
  for (const auto& rel : tracked_paths()) {
    try {
      if (owner_of(rel) == ctx_.self) {
        handle_sending(rel, report);
      } else {
        handle_receiving(rel, report);
      }
    } catch (const Error& e) {
      report.errors.push_back(rel + ": " + e.what());
    }
  }
  return report;
}

// ---- sending side ----------------------------------------------------------

SyncEngine::Staged SyncEngine::stage(const SyncIndexEntry& entry, const Delta& delta, bool rewrite) {
  const auto& s = ctx_.scheme;
  const std::uint64_t base = rewrite ? 0 : delta.base_len;
  const std::uint64_t new_len = delta.base_len + delta.appended.size();
  const std::size_t nb = s.full_blocks(base);
  const std::size_t keep = nb * s.element_width();

  Bytes content = read_prefix(ctx_.local_dir / entry.rel_path, delta.base_len);
  append(content, delta.appended);

  Staged st;
  st.entry = entry;
  st.entry.role = Role::kSending;
  st.entry.owner = ctx_.self;
  st.entry.media = is_media_path(entry.rel_path);
  st.entry.content_version = entry.content_version + 1;
  if (rewrite && entry.content_version > 0) ++st.entry.generation;
  st.entry.last_plain_len = new_len;
  st.entry.prefix_digest = digest_hex(content);
  st.entry.last_versions.assign(s.shares(), 0);
  st.entry.last_sizes.assign(s.shares(), 0);

  const ByteView tail(content.data() + nb * s.plain_block(), content.size() - nb * s.plain_block());
  const auto shares = codec::split(tail, s, *ctx_.rnd);
  const ShareFileHeader h{kFormatVersion, st.entry.content_version, new_len,
                          ShareFileHeader::make_flags(st.entry.media, st.entry.generation)};
  for (unsigned slot = 0; slot < s.shares(); ++slot) {
    Bytes obj = mask_header(h, ctx_.conv_secret, slot, entry.rel_path);
    if (!rewrite && base > 0 && listings_.size() == s.shares() && listings_[slot].available) {
      auto it = listings_[slot].entries.find(entry.rel_path);
      if (it != listings_[slot].entries.end() && it->second.size != kHeaderBytes + s.encoded_length(base)) {
        fail(ErrorCode::kBaseMismatch, "share " + std::to_string(slot) + " of " + entry.rel_path + " holds " +
                                           std::to_string(it->second.size) + " bytes, expected the synced base");
      }
    }
    if (keep > 0) {
      auto prior = read_file(local_copy(slot, entry.rel_path));
      if (prior.size() != s.encoded_length(base)) {
        fail(ErrorCode::kBaseMismatch, "local share copy " + std::to_string(slot) + " of " + entry.rel_path +
                                           " does not match the synced length");
      }
      obj.insert(obj.end(), prior.begin(), prior.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    append(obj, shares.shares[slot].payload);
    st.objects.push_back(std::move(obj));
  }

  // Durable before the first put, so a retry re-sends identical bytes.
  const auto dir = pending_dir(entry.rel_path);
  for (unsigned slot = 0; slot < s.shares(); ++slot) write_file_atomic(dir / ("slot" + std::to_string(slot)), st.objects[slot]);
  SyncIndex meta;
  meta.put(st.entry);
  meta.save(dir / "entry");
  return st;
}

std::optional<SyncEngine::Staged> SyncEngine::load_staged(const std::string& rel) const {
  const auto dir = pending_dir(rel);
  if (!fs::exists(dir / "entry")) {
    std::error_code ec;
    fs::remove_all(dir, ec);
    return std::nullopt;
  }
  auto meta = SyncIndex::load(dir / "entry");
  const auto* e = meta.find(rel);
  if (!e) fail(ErrorCode::kCorruptState, "staged push for " + rel + " has no entry");
  Staged st{*e, {}};
  for (unsigned slot = 0; slot < ctx_.scheme.shares(); ++slot) {
    st.objects.push_back(read_file(dir / ("slot" + std::to_string(slot))));
  }
  return st;
}

bool SyncEngine::resume(Staged& st, SyncReport& report) {
  const auto& rel = st.entry.rel_path;
  guard_owner(rel);
  const auto dir = pending_dir(rel);
  unsigned done = 0;
  for (unsigned slot = 0; slot < st.objects.size(); ++slot) {
    if (st.entry.last_versions[slot] == 0) {
      try {
        auto e = ctx_.backends[slot]->put_object(remote_path(rel), st.objects[slot]);
        ++report.uploads;
        note_put(slot, rel, e);
        st.entry.last_versions[slot] = e.version;
        st.entry.last_sizes[slot] = e.size;
        SyncIndex meta;
        meta.put(st.entry);
        meta.save(dir / "entry");
      } catch (const Error& e) {
        report.errors.push_back(rel + " slot " + std::to_string(slot) + ": " + e.what());
      }
    }
    if (st.entry.last_versions[slot] != 0) ++done;
  }
  const unsigned need = ctx_.scheme.kind == codec::SchemeKind::kShamir ? ctx_.scheme.required() : ctx_.scheme.shares();
  if (done < need) return false;
  for (unsigned slot = 0; slot < st.objects.size(); ++slot) {
    write_file_atomic(local_copy(slot, rel), ByteView(st.objects[slot]).subspan(kHeaderBytes));
  }
  st.entry.last_sync_time = ctx_.clock->now_ms();
  index_.put(st.entry);
  save_index();
  std::error_code ec;
  fs::remove_all(dir, ec);
  return true;
}

SyncIndexEntry SyncEngine::push_sending(const SyncIndexEntry& entry, const Delta& delta, SyncReport& report,
                                        bool rewrite) {
  guard_owner(entry.rel_path);
  if (rewrite && delta.base_len != 0) fail(ErrorCode::kInvalidArgument, "a rewrite carries the whole file");
  auto st = stage(entry, delta, rewrite);
  if (!resume(st, report)) {
    report.waiting.push_back(entry.rel_path);
    return entry;
  }
  return st.entry;
}

Bytes SyncEngine::object_for(const SyncIndexEntry& entry, unsigned slot) const {
  const ShareFileHeader h{kFormatVersion, entry.content_version, entry.last_plain_len,
                          ShareFileHeader::make_flags(entry.media, entry.generation)};
  auto obj = mask_header(h, ctx_.conv_secret, slot, entry.rel_path);
  append(obj, read_file(local_copy(slot, entry.rel_path)));
  return obj;
}

void SyncEngine::repair(SyncIndexEntry& entry, SyncReport& report) {
  const std::uint64_t expected = kHeaderBytes + ctx_.scheme.encoded_length(entry.last_plain_len);
  bool changed = false;
  for (unsigned slot = 0; slot < listings_.size(); ++slot) {
    if (!listings_[slot].available) continue;
    auto it = listings_[slot].entries.find(entry.rel_path);
    if (it != listings_[slot].entries.end() && it->second.size == expected) continue;
    try {
      auto e = ctx_.backends[slot]->put_object(remote_path(entry.rel_path), object_for(entry, slot));
      ++report.uploads;
      ++report.repairs;
      note_put(slot, entry.rel_path, e);
      entry.last_versions[slot] = e.version;
      entry.last_sizes[slot] = e.size;
      changed = true;
    } catch (const Error& e) {
      report.errors.push_back(entry.rel_path + " slot " + std::to_string(slot) + ": " + e.what());
    }
  }
  if (changed) save_index();
}

void SyncEngine::send_delete(const std::string& rel, SyncReport& report) {
  guard_owner(rel);
  bool all = true;
  for (unsigned slot = 0; slot < ctx_.backends.size(); ++slot) {
    try {
      ctx_.backends[slot]->delete_object(remote_path(rel));
      ++report.deletes;
    } catch (const Error& e) {
      all = false;
      report.errors.push_back(rel + " slot " + std::to_string(slot) + ": " + e.what());
    }
  }
  if (!all) {
    report.waiting.push_back(rel);
    return;
  }
  std::error_code ec;
  for (unsigned slot = 0; slot < ctx_.backends.size(); ++slot) fs::remove(local_copy(slot, rel), ec);
  index_.erase(rel);
  save_index();
}

void SyncEngine::handle_sending(const std::string& rel, SyncReport& report) {
  guard_owner(rel);
  if (fs::exists(pending_dir(rel))) {
    if (auto st = load_staged(rel)) {
      if (!resume(*st, report)) {
        report.waiting.push_back(rel);
        return;
      }
    }
  }
  auto* idx = index_.find(rel);
  const auto local = local_state(rel);
  const auto action = classify(Role::kSending, local, {}, ctx_.scheme.required(), idx);
  if (action != Action::kInSync) report.actions.push_back({rel, action});
  switch (action) {
    case Action::kSendCreate: {
      SyncIndexEntry fresh;
      fresh.rel_path = rel;
      push_sending(fresh, {0, read_file(ctx_.local_dir / rel)}, report);
      break;
    }
    case Action::kSendUpdate: {
      const auto content = read_file(ctx_.local_dir / rel);
      std::optional<Delta> delta;
      if (!idx->media) {
        try {
          delta = compute_delta(idx->last_plain_len, content, idx->prefix_digest);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNotAppendOnly) throw;
        }
      }
      if (delta) {
        try {
          push_sending(*idx, *delta, report);
          break;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kBaseMismatch) throw;
          report.errors.push_back(rel + ": " + e.what() + "; rewriting");
        }
      }
      push_sending(*idx, {0, content}, report, true);
      break;
    }
    case Action::kSendDelete: send_delete(rel, report); break;
    case Action::kConflict: report.conflicts.push_back(rel); break;
    case Action::kInSync:
      if (idx) repair(*idx, report);
      break;
    default: break;
  }
}

// ---- receiving side --------------------------------------------------------

const SyncEngine::Probe& SyncEngine::probe(const std::string& rel, unsigned slot, std::uint64_t offset,
                                           SyncReport& report) {
  const auto& listed = listings_[slot].entries.at(rel);
  auto key = std::make_pair(rel, slot);
  auto it = probes_.find(key);
  if (it != probes_.end() && it->second.remote_version == listed.version && it->second.remote_size == listed.size &&
      it->second.offset == offset) {
    return it->second;
  }
  auto r = ctx_.backends[slot]->get_ranges(remote_path(rel), {{0, kHeaderBytes}, {kHeaderBytes + offset, backend::kToEnd}});
  ++report.downloads;
  Probe p;
  p.remote_version = r.entry.version;
  p.remote_size = r.entry.size;
  p.header = unmask_header(r.parts[0], ctx_.conv_secret, slot, rel);
  p.offset = offset;
  p.suffix = std::move(r.parts[1]);
  if (r.entry.size != kHeaderBytes + ctx_.scheme.encoded_length(p.header.payload_len)) {
    fail(ErrorCode::kCorruptState, "share " + std::to_string(slot) + " of " + rel + " has an inconsistent size");
  }
  return probes_[key] = std::move(p);
}

std::vector<ShareState> SyncEngine::observe_shares(const std::string& rel, SyncReport& report) {
  const auto* idx = index_.find(rel);
  std::vector<ShareState> out;
  for (unsigned slot = 0; slot < listings_.size(); ++slot) {
    if (!listings_[slot].available) {
      out.push_back(ShareState::unknown());
      continue;
    }
    auto it = listings_[slot].entries.find(rel);
    if (it == listings_[slot].entries.end()) {
      out.push_back(ShareState::absent());
      continue;
    }
    if (idx && slot < idx->last_versions.size() && idx->last_versions[slot] != 0 &&
        idx->last_versions[slot] == it->second.version && idx->last_sizes[slot] == it->second.size) {
      out.push_back(ShareState::at(idx->content_version));
      continue;
    }
    auto cached = probes_.find({rel, slot});
    if (cached != probes_.end() && cached->second.remote_version == it->second.version &&
        cached->second.remote_size == it->second.size) {
      out.push_back(ShareState::at(cached->second.header.content_version));
      continue;
    }
    try {
      out.push_back(ShareState::at(probe(rel, slot, incremental_offset(idx), report).header.content_version));
    } catch (const Error& e) {
      report.errors.push_back(rel + " slot " + std::to_string(slot) + ": " + e.what());
      out.push_back(ShareState::unknown());
    }
  }
  return out;
}

void SyncEngine::handle_receiving(const std::string& rel, SyncReport& report) {
  const auto shares = observe_shares(rel, report);
  auto* idx = index_.find(rel);
  const auto local = local_state(rel);
  const auto action = classify(Role::kReceiving, local, shares, ctx_.scheme.required(), idx);
  if (action != Action::kInSync) report.actions.push_back({rel, action});
  switch (action) {
    case Action::kRecvCreate:
    case Action::kRecvUpdate:
      try {
        pull_receiving(rel, report);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kVersionSkew) throw;
        report.waiting.push_back(rel);
      }
      return;
    case Action::kRecvDelete: {
      std::error_code ec;
      fs::remove(ctx_.local_dir / rel, ec);
      index_.erase(rel);
      save_index();
      report.received.push_back(rel);
      return;
    }
    case Action::kWaiting: report.waiting.push_back(rel); break;
    default: break;
  }
  if (!idx) return;
  idx->last_versions.resize(shares.size(), 0);
  idx->last_sizes.resize(shares.size(), 0);
  if (!local.exists && std::all_of(shares.begin(), shares.end(),
                                   [](const auto& s) { return s.presence == ShareState::kAbsent; })) {
    index_.erase(rel);
    save_index();
    return;
  }
  // Re-puts of unchanged content: remember the new object versions so they
  // are not probed again.
  bool changed = false;
  for (unsigned slot = 0; slot < shares.size(); ++slot) {
    if (shares[slot].presence != ShareState::kPresent || shares[slot].content_version != idx->content_version) continue;
    const auto& listed = listings_[slot].entries.at(rel);
    if (idx->last_versions[slot] != listed.version || idx->last_sizes[slot] != listed.size) {
      idx->last_versions[slot] = listed.version;
      idx->last_sizes[slot] = listed.size;
      changed = true;
    }
  }
  if (changed) save_index();
}

void SyncEngine::pull_receiving(const std::string& rel, SyncReport& report) {
  const auto& s = ctx_.scheme;
  const auto shares = observe_shares(rel, report);
  const auto* idx = index_.find(rel);
  const auto local = local_state(rel);

  std::uint64_t newest = 0;
  for (const auto& sh : shares) {
    if (sh.presence == ShareState::kPresent) newest = std::max(newest, sh.content_version);
  }
  std::vector<unsigned> chosen;
  for (unsigned slot = 0; slot < shares.size() && chosen.size() < s.required(); ++slot) {
    if (shares[slot].presence == ShareState::kPresent && shares[slot].content_version == newest) chosen.push_back(slot);
  }
  if (chosen.size() < s.required()) {
    fail(ErrorCode::kVersionSkew, rel + ": only " + std::to_string(chosen.size()) + " shares agree");
  }

  // Headers first, at the offset an append would continue from.
  const std::uint64_t inc = incremental_offset(idx);
  std::vector<const Probe*> probes;
  for (auto slot : chosen) probes.push_back(&probe(rel, slot, inc, report));
  const auto h = probes[0]->header;
  for (const auto* p : probes) {
    if (p->header != h) fail(ErrorCode::kVersionSkew, rel + ": share headers disagree");
  }
  const bool incremental = idx && idx->content_version > 0 && local.exists && local.length >= idx->last_plain_len &&
                           h.generation() == idx->generation && h.payload_len >= idx->last_plain_len &&
                           h.content_version > idx->content_version;
  const std::uint64_t base = incremental ? idx->last_plain_len : 0;
  const std::size_t nb = s.full_blocks(base);
  const std::uint64_t offset = nb * s.element_width();
  if (offset != inc) {
    probes.clear();
    for (auto slot : chosen) probes.push_back(&probe(rel, slot, offset, report));
    for (const auto* p : probes) {
      if (p->header != h) fail(ErrorCode::kVersionSkew, rel + ": share headers disagree");
    }
  }

  codec::ShareSet ss;
  ss.scheme = s;
  ss.plaintext_len = h.payload_len - nb * s.plain_block();
  for (std::size_t i = 0; i < chosen.size(); ++i) ss.shares.push_back({chosen[i] + 1, probes[i]->suffix});
  auto chunk = codec::reconstruct(ss);
  if (chunk.size() != ss.plaintext_len) {
    fail(ErrorCode::kReconstructionLengthMismatch,
         rel + ": expected " + std::to_string(ss.plaintext_len) + " bytes, got " + std::to_string(chunk.size()));
  }
  Bytes content = read_prefix(ctx_.local_dir / rel, nb * s.plain_block());
  append(content, chunk);
  write_file_atomic(ctx_.local_dir / rel, content);

  SyncIndexEntry entry = idx ? *idx : SyncIndexEntry{};
  entry.rel_path = rel;
  entry.role = Role::kReceiving;
  entry.owner = *owner_of(rel);
  entry.content_version = h.content_version;
  entry.generation = h.generation();
  entry.media = h.media();
  entry.last_plain_len = h.payload_len;
  entry.prefix_digest = digest_hex(content);
  entry.last_sync_time = ctx_.clock->now_ms();
  entry.last_versions.assign(s.shares(), 0);
  entry.last_sizes.assign(s.shares(), 0);
  for (unsigned slot = 0; slot < shares.size(); ++slot) {
    if (shares[slot].presence == ShareState::kPresent && shares[slot].content_version == newest) {
      const auto& listed = listings_[slot].entries.at(rel);
      entry.last_versions[slot] = listed.version;
      entry.last_sizes[slot] = listed.size;
    }
  }
  index_.put(std::move(entry));
  save_index();
  report.received.push_back(rel);
}

}  // namespace snet::sync
