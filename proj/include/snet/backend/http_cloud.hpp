#pragma once

#include <memory>
#include <string>
#include <thread>

#include "snet/backend/simulated.hpp"

namespace httplib {
class Server;
}

namespace snet::backend {

// Loopback HTTP front end for a SimulatedCloud.
//   PUT    /objects/<path>                 body = content
//   GET    /objects/<path>?range=a-b&...   body = ranges concatenated
//   DELETE /objects/<path>
//   GET    /list?prefix=<p>                JSON array of entries
//   POST   /share                          JSON {prefix, peer}
// The caller's account travels in X-Snet-Account; entry metadata comes back
// in X-Snet-Size, X-Snet-Version, X-Snet-Mtime and X-Snet-Parts (part sizes).
class CloudService {
 public:
  explicit CloudService(std::shared_ptr<SimulatedCloud> cloud);
  ~CloudService();

  // Binds host:port (0 = ephemeral) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

  std::string url() const;
  SimulatedCloud& cloud() { return *cloud_; }

 private:
  void install_routes();

  std::shared_ptr<SimulatedCloud> cloud_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
};

class HttpSimulatedBackend final : public Backend {
 public:
  explicit HttpSimulatedBackend(BackendHandle handle);

 protected:
  RemoteEntry do_put(const std::string& path, ByteView data) override;
  RangedRead do_get(const std::string& path, const std::vector<ByteRange>& ranges) override;
  std::vector<RemoteEntry> do_list(const std::string& prefix) override;
  void do_delete(const std::string& path) override;
  void do_share(const std::string& prefix, const std::string& peer_account) override;

 private:
  std::string host_;
  int port_ = 0;
};

}  // namespace snet::backend
