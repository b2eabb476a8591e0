#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>

#include "snet/conv/conversation.hpp"

namespace httplib {
class Server;
}

namespace snet::service {

inline constexpr int kDefaultPort = 7474;

struct DaemonConfig {
  std::string host = "127.0.0.1";
  int port = kDefaultPort;  // 0 picks a free port
  std::filesystem::path data_dir;
  std::filesystem::path token_file;  // empty: <data_dir>/auth_token
  std::int64_t poll_interval_ms = 1000;
  std::int64_t long_poll_ms = 25'000;
  std::filesystem::path ui_dir;  // served at /ui/ when set and present
};

// kConfigInvalid unless the host is a loopback address and the numbers make sense.
void validate(const DaemonConfig& cfg);

// Reads the 256-bit hex token, creating it with owner-only permissions on
// first use.
std::string ensure_auth_token(const std::filesystem::path& file, RandomSource& rnd);

// Local daemon: one owner thread runs the sync loop and every mutation; HTTP
// handlers read snapshots and forward commands to it.
class Daemon {
 public:
  explicit Daemon(DaemonConfig cfg, conv::Env env = conv::system_env());
  ~Daemon();

  // Binds, starts the owner loop and serves in the background. Returns the port.
  int start();
  // Stops accepting requests, lets the current cycle finish and joins.
  void stop();
  // Blocks until stop() is called from elsewhere.
  void wait();

  const std::string& auth_token() const { return token_; }
  int port() const { return port_; }

 private:
  void install_routes();
  void owner_loop();
  void run_cycle();
  void request_cycle();
  void notify_messages();
  // Runs `fn` on the owner thread and waits for it.
  template <typename F>
  auto submit(F&& fn) -> decltype(fn());

  std::shared_ptr<conv::Conversation> find(const std::string& conv_token) const;

  DaemonConfig cfg_;
  conv::Env env_;
  conv::Device device_;
  std::string token_;
  std::unique_ptr<httplib::Server> server_;
  std::thread http_thread_;
  std::thread owner_thread_;
  int port_ = 0;

  mutable std::shared_mutex convs_mu_;
  std::map<std::string, std::shared_ptr<conv::Conversation>> convs_;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<std::function<void()>> queue_;
  bool cycle_requested_ = false;
  bool owner_stop_ = false;
  bool owner_done_ = false;
  std::atomic<bool> stopping_{false};

  std::mutex msg_mu_;
  std::condition_variable msg_cv_;
  std::uint64_t msg_generation_ = 0;

  mutable std::mutex status_mu_;
  std::int64_t last_cycle_ms_ = -1;  // duration of the last cycle
  std::int64_t last_cycle_at_ms_ = -1;
  std::uint64_t cycles_ = 0;
  std::map<std::string, std::string> backend_status_;  // label -> SYNCED | WAITING | ERROR

  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
  bool stopped_ = false;
};

}  // namespace snet::service
