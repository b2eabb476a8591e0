#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "snet/backend/backend.hpp"
#include "snet/clock.hpp"

namespace snet::backend {

struct SimulatedOptions {
  std::int64_t delay_lo_ms = 0;
  std::int64_t delay_hi_ms = 0;
  std::uint64_t seed = 1;
  std::uint64_t quota_bytes = 0;  // 0 = unlimited
};

// One simulated provider. Every write becomes visible to its writer at once
// and to other accounts after a per-write delay drawn from [lo, hi]; deletes
// propagate the same way as tombstones. Top-level directories belong to the
// first account that writes or shares them; others need a grant.
class SimulatedCloud {
 public:
  explicit SimulatedCloud(SimulatedOptions options = {},
                          std::shared_ptr<const Clock> clock = std::make_shared<SystemClock>());

  // Process-wide registry used by open_backend for SIMULATED handles.
  static std::shared_ptr<SimulatedCloud> open(const std::string& id);
  static void install(const std::string& id, std::shared_ptr<SimulatedCloud> cloud);
  static void forget(const std::string& id);

  void register_account(const std::string& account);
  bool has_account(const std::string& account) const;

  RemoteEntry put(const std::string& account, const std::string& path, ByteView data);
  RangedRead get(const std::string& account, const std::string& path, const std::vector<ByteRange>& ranges);
  std::vector<RemoteEntry> list(const std::string& account, const std::string& prefix);
  void remove(const std::string& account, const std::string& path);
  void share(const std::string& account, const std::string& prefix, const std::string& peer);

  // Fault injection.
  void set_unavailable(bool down);
  void fail_next_puts(int count);
  void set_quota(std::uint64_t bytes);
  void set_delay(std::int64_t lo_ms, std::int64_t hi_ms);

  // Time at which every write so far is visible to everyone.
  std::int64_t quiescent_at() const;
  // Raw stored bytes of every live revision, for content scans.
  std::vector<std::pair<std::string, Bytes>> dump() const;
  std::uint64_t stored_bytes() const;

  const Clock& clock() const { return *clock_; }

 private:
  struct Revision {
    std::shared_ptr<const Bytes> data;  // null for a tombstone
    std::string writer;
    std::int64_t written_ms;
    std::int64_t visible_ms;
    std::uint64_t version;
  };
  struct Object {
    std::vector<Revision> revisions;
    std::uint64_t next_version = 1;
  };

  void check_up_locked();
  void check_account_locked(const std::string& account) const;
  bool may_access_locked(const std::string& account, const std::string& path) const;
  void claim_locked(const std::string& account, const std::string& path);
  const Revision* visible_locked(const Object& obj, const std::string& account, std::int64_t now) const;
  std::int64_t draw_delay_locked();

  mutable std::mutex mu_;
  SimulatedOptions options_;
  std::shared_ptr<const Clock> clock_;
  std::mt19937_64 rng_;
  std::set<std::string> accounts_;
  std::map<std::string, std::string> owners_;                // top-level dir -> account
  std::map<std::string, std::set<std::string>> grants_;      // account -> prefixes
  std::map<std::string, Object> objects_;
  bool down_ = false;
  int failing_puts_ = 0;
};

class SimulatedBackend final : public Backend {
 public:
  SimulatedBackend(BackendHandle handle, std::shared_ptr<SimulatedCloud> cloud);
  SimulatedCloud& cloud() { return *cloud_; }

 protected:
  RemoteEntry do_put(const std::string& path, ByteView data) override;
  RangedRead do_get(const std::string& path, const std::vector<ByteRange>& ranges) override;
  std::vector<RemoteEntry> do_list(const std::string& prefix) override;
  void do_delete(const std::string& path) override;
  void do_share(const std::string& prefix, const std::string& peer_account) override;

 private:
  std::shared_ptr<SimulatedCloud> cloud_;
};

}  // namespace snet::backend
