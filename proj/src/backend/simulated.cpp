#include "snet/backend/simulated.hpp"

#include <algorithm>

#include "snet/error.hpp"

namespace snet::backend {

namespace {

std::mutex registry_mu;
std::map<std::string, std::shared_ptr<SimulatedCloud>>& registry() {
  static std::map<std::string, std::shared_ptr<SimulatedCloud>> r;
  return r;
}

std::string top_dir(const std::string& path) { return path.substr(0, path.find('/')); }

std::string as_dir(std::string prefix) {
  if (!prefix.empty() && prefix.back() != '/') prefix += '/';
  return prefix;
}

bool under(const std::string& path, const std::string& dir) {
  return path.compare(0, dir.size(), dir) == 0 || path + '/' == dir;
}

}  // namespace

SimulatedCloud::SimulatedCloud(SimulatedOptions options, std::shared_ptr<const Clock> clock)
    : options_(options), clock_(std::move(clock)), rng_(options.seed) {
  if (options_.delay_lo_ms < 0 || options_.delay_hi_ms < options_.delay_lo_ms) {
    fail(ErrorCode::kInvalidArgument, "delay interval must satisfy 0 <= lo <= hi");
  }
}

std::shared_ptr<SimulatedCloud> SimulatedCloud::open(const std::string& id) {
  std::lock_guard lock(registry_mu);
  auto& slot = registry()[id];
  if (!slot) slot = std::make_shared<SimulatedCloud>();
  return slot;
}

void SimulatedCloud::install(const std::string& id, std::shared_ptr<SimulatedCloud> cloud) {
  std::lock_guard lock(registry_mu);
  registry()[id] = std::move(cloud);
}

void SimulatedCloud::forget(const std::string& id) {
  std::lock_guard lock(registry_mu);
  registry().erase(id);
}

void SimulatedCloud::register_account(const std::string& account) {
  std::lock_guard lock(mu_);
  accounts_.insert(account);
}

bool SimulatedCloud::has_account(const std::string& account) const {
  std::lock_guard lock(mu_);
  return accounts_.count(account) > 0;
}

void SimulatedCloud::check_up_locked() {
  if (down_) fail(ErrorCode::kBackendUnavailable, "simulated provider is down");
}

void SimulatedCloud::check_account_locked(const std::string& account) const {
  if (account.empty()) fail(ErrorCode::kAccessDenied, "no account");
}

bool SimulatedCloud::may_access_locked(const std::string& account, const std::string& path) const {
  auto owner = owners_.find(top_dir(path));
  if (owner == owners_.end() || owner->second == account) return true;
  auto g = grants_.find(account);
  if (g == grants_.end()) return false;
  return std::any_of(g->second.begin(), g->second.end(), [&](const auto& dir) { return under(path, dir); });
}

void SimulatedCloud::claim_locked(const std::string& account, const std::string& path) {
  owners_.emplace(top_dir(path), account);
}

const SimulatedCloud::Revision* SimulatedCloud::visible_locked(const Object& obj, const std::string& account,
                                                               std::int64_t now) const {
  for (auto it = obj.revisions.rbegin(); it != obj.revisions.rend(); ++it) {
    if (it->writer == account || it->visible_ms <= now) return &*it;
  }
  return nullptr;
}

std::int64_t SimulatedCloud::draw_delay_locked() {
  if (options_.delay_hi_ms == options_.delay_lo_ms) return options_.delay_lo_ms;
  std::uniform_int_distribution<std::int64_t> d(options_.delay_lo_ms, options_.delay_hi_ms);
  return d(rng_);
}

RemoteEntry SimulatedCloud::put(const std::string& account, const std::string& path, ByteView data) {
  std::lock_guard lock(mu_);
  check_up_locked();
  check_account_locked(account);
  accounts_.insert(account);
  if (failing_puts_ > 0) {
    --failing_puts_;
    fail(ErrorCode::kBackendUnavailable, "injected put failure");
  }
  if (!may_access_locked(account, path)) fail(ErrorCode::kAccessDenied, account + " may not write " + path);
  auto& obj = objects_[path];
  if (options_.quota_bytes > 0) {
    std::uint64_t old = 0;
    if (!obj.revisions.empty() && obj.revisions.back().data) old = obj.revisions.back().data->size();
    std::uint64_t total = 0;
    for (const auto& [p, o] : objects_) {
      if (!o.revisions.empty() && o.revisions.back().data) total += o.revisions.back().data->size();
    }
    if (total - old + data.size() > options_.quota_bytes) {
      fail(ErrorCode::kQuotaExceeded, "quota of " + std::to_string(options_.quota_bytes) + " bytes exceeded");
    }
  }
  claim_locked(account, path);
  const auto now = clock_->now_ms();
  Revision rev{std::make_shared<const Bytes>(data.begin(), data.end()), account, now, now + draw_delay_locked(),
               obj.next_version++};
  // Drop revisions that every account has already moved past.
  const std::int64_t horizon = std::min(rev.visible_ms, now);
  while (obj.revisions.size() > 1 && obj.revisions[1].visible_ms <= horizon) obj.revisions.erase(obj.revisions.begin());
  obj.revisions.push_back(rev);
  return {path, rev.data->size(), now, rev.version};
}

RangedRead SimulatedCloud::get(const std::string& account, const std::string& path,
                               const std::vector<ByteRange>& ranges) {
  std::lock_guard lock(mu_);
  check_up_locked();
  check_account_locked(account);
  accounts_.insert(account);
  if (!may_access_locked(account, path)) fail(ErrorCode::kAccessDenied, account + " may not read " + path);
  auto it = objects_.find(path);
  if (it == objects_.end() || it->second.revisions.empty()) fail(ErrorCode::kNotFound, path);
  const auto* rev = visible_locked(it->second, account, clock_->now_ms());
  if (!rev) fail(ErrorCode::kNotYetVisible, path);
  if (!rev->data) fail(ErrorCode::kNotFound, path);
  return {slice_ranges(*rev->data, ranges), {path, rev->data->size(), rev->written_ms, rev->version}};
}

std::vector<RemoteEntry> SimulatedCloud::list(const std::string& account, const std::string& prefix) {
  std::lock_guard lock(mu_);
  check_up_locked();
  check_account_locked(account);
  accounts_.insert(account);
  const auto now = clock_->now_ms();
  std::vector<RemoteEntry> out;
  for (auto it = objects_.lower_bound(prefix); it != objects_.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    if (!may_access_locked(account, it->first)) continue;
    const auto* rev = visible_locked(it->second, account, now);
    if (!rev || !rev->data) continue;
    out.push_back({it->first, rev->data->size(), rev->written_ms, rev->version});
  }
  return out;
}

void SimulatedCloud::remove(const std::string& account, const std::string& path) {
  std::lock_guard lock(mu_);
  check_up_locked();
  check_account_locked(account);
  accounts_.insert(account);
  if (!may_access_locked(account, path)) fail(ErrorCode::kAccessDenied, account + " may not delete " + path);
  auto it = objects_.find(path);
  if (it == objects_.end() || it->second.revisions.empty() || !it->second.revisions.back().data) return;
  const auto now = clock_->now_ms();
  auto& obj = it->second;
  obj.revisions.push_back({nullptr, account, now, now + draw_delay_locked(), obj.next_version++});
}

void SimulatedCloud::share(const std::string& account, const std::string& prefix, const std::string& peer) {
  std::lock_guard lock(mu_);
  check_up_locked();
  check_account_locked(account);
  accounts_.insert(account);
  if (!accounts_.count(peer)) fail(ErrorCode::kUnknownPeer, "no account '" + peer + "'");
  const auto dir = as_dir(prefix);
  if (!may_access_locked(account, dir)) fail(ErrorCode::kAccessDenied, account + " may not share " + prefix);
  claim_locked(account, dir);
  grants_[peer].insert(dir);
}

void SimulatedCloud::set_unavailable(bool down) {
  std::lock_guard lock(mu_);
  down_ = down;
}

void SimulatedCloud::fail_next_puts(int count) {
  std::lock_guard lock(mu_);
  failing_puts_ = count;
}

void SimulatedCloud::set_quota(std::uint64_t bytes) {
  std::lock_guard lock(mu_);
  options_.quota_bytes = bytes;
}

void SimulatedCloud::set_delay(std::int64_t lo_ms, std::int64_t hi_ms) {
  if (lo_ms < 0 || hi_ms < lo_ms) fail(ErrorCode::kInvalidArgument, "delay interval must satisfy 0 <= lo <= hi");
  std::lock_guard lock(mu_);
  options_.delay_lo_ms = lo_ms;
  options_.delay_hi_ms = hi_ms;
}

std::int64_t SimulatedCloud::quiescent_at() const {
  std::lock_guard lock(mu_);
  std::int64_t t = 0;
  for (const auto& [p, o] : objects_) {
    for (const auto& r : o.revisions) t = std::max(t, r.visible_ms);
  }
  return t;
}

std::vector<std::pair<std::string, Bytes>> SimulatedCloud::dump() const {
  std::lock_guard lock(mu_);
  std::vector<std::pair<std::string, Bytes>> out;
  for (const auto& [p, o] : objects_) {
    for (const auto& r : o.revisions) {
      if (r.data) out.emplace_back(p, *r.data);
    }
  }
  return out;
}

std::uint64_t SimulatedCloud::stored_bytes() const {
  std::lock_guard lock(mu_);
  std::uint64_t total = 0;
  for (const auto& [p, o] : objects_) {
    if (!o.revisions.empty() && o.revisions.back().data) total += o.revisions.back().data->size();
  }
  return total;
}

SimulatedBackend::SimulatedBackend(BackendHandle handle, std::shared_ptr<SimulatedCloud> cloud)
    : Backend(std::move(handle)), cloud_(std::move(cloud)) {
  cloud_->register_account(this->handle().account);
}

RemoteEntry SimulatedBackend::do_put(const std::string& path, ByteView data) {
  return cloud_->put(handle().account, path, data);
}

RangedRead SimulatedBackend::do_get(const std::string& path, const std::vector<ByteRange>& ranges) {
  return cloud_->get(handle().account, path, ranges);
}

std::vector<RemoteEntry> SimulatedBackend::do_list(const std::string& prefix) {
  return cloud_->list(handle().account, prefix);
}

void SimulatedBackend::do_delete(const std::string& path) { cloud_->remove(handle().account, path); }

void SimulatedBackend::do_share(const std::string& prefix, const std::string& peer_account) {
  cloud_->share(handle().account, prefix, peer_account);
}

}  // namespace snet::backend
