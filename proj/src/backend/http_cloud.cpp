#include "snet/backend/http_cloud.hpp"

#include <httplib.h>

#include <json.hpp>

#include "snet/error.hpp"

namespace snet::backend {

namespace {

using nlohmann::json;

constexpr const char* kAccountHeader = "X-Snet-Account";

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kUnknownPeer: return 404;
    case ErrorCode::kNotYetVisible: return 409;
    case ErrorCode::kAccessDenied: return 403;
    case ErrorCode::kInvalidPath: return 400;
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kQuotaExceeded: return 507;
    case ErrorCode::kBackendUnavailable: return 503;
    default: return 500;
  }
}

json entry_json(const RemoteEntry& e) {
  return {{"path", e.path}, {"size", e.size}, {"mtime", e.mtime_ms}, {"version", e.version}};
}

RemoteEntry entry_from(const json& j) {
  return {j.at("path").get<std::string>(), j.at("size").get<std::uint64_t>(), j.at("mtime").get<std::int64_t>(),
          j.at("version").get<std::uint64_t>()};
}

template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    res.status = status_for(e.code());
    res.set_content(json{{"error", error_code_name(e.code())}, {"detail", e.detail()}}.dump(), "application/json");
  } catch (const std::exception& e) {
    res.status = 400;
    res.set_content(json{{"error", "invalid_argument"}, {"detail", e.what()}}.dump(), "application/json");
  }
}

std::vector<ByteRange> parse_ranges(const httplib::Request& req) {
  std::vector<ByteRange> out;
  const auto n = req.get_param_value_count("range");
  for (std::size_t i = 0; i < n; ++i) {
    const auto spec = req.get_param_value("range", i);
    const auto dash = spec.find('-');
    if (dash == std::string::npos) fail(ErrorCode::kInvalidArgument, "range must be a-b or a-");
    ByteRange r;
    r.offset = std::stoull(spec.substr(0, dash));
    const auto end = spec.substr(dash + 1);
    if (!end.empty()) {
      const auto last = std::stoull(end);
      if (last < r.offset) fail(ErrorCode::kInvalidArgument, "empty range");
      r.length = last - r.offset;
    }
    out.push_back(r);
  }
  if (out.empty()) out.push_back(ByteRange{});
  return out;
}

[[noreturn]] void raise_from(const httplib::Result& res, const std::string& what) {
  if (!res) fail(ErrorCode::kBackendUnavailable, what + ": " + httplib::to_string(res.error()));
  ErrorCode code = ErrorCode::kIoFailure;
  std::string detail = res->body;
  try {
    auto j = json::parse(res->body);
    code = error_code_from_name(j.at("error").get<std::string>());
    detail = j.value("detail", "");
  } catch (const std::exception&) {
  }
  fail(code, detail);
}

}  // namespace

CloudService::CloudService(std::shared_ptr<SimulatedCloud> cloud)
    : cloud_(std::move(cloud)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

CloudService::~CloudService() { stop(); }

void CloudService::install_routes() {
  auto& s = *server_;
  s.Put(R"(/objects/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string path = req.matches[1];
      validate_path(path);
      auto e = cloud_->put(req.get_header_value(kAccountHeader), path, to_bytes(req.body));
      res.set_content(entry_json(e).dump(), "application/json");
    });
  });
  s.Get(R"(/objects/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string path = req.matches[1];
      validate_path(path);
      auto r = cloud_->get(req.get_header_value(kAccountHeader), path, parse_ranges(req));
      std::string body, sizes;
      for (const auto& p : r.parts) {
        if (!sizes.empty()) sizes += ',';
        sizes += std::to_string(p.size());
        body.append(p.begin(), p.end());
      }
      res.set_header("X-Snet-Size", std::to_string(r.entry.size));
      res.set_header("X-Snet-Version", std::to_string(r.entry.version));
      res.set_header("X-Snet-Mtime", std::to_string(r.entry.mtime_ms));
      res.set_header("X-Snet-Parts", sizes);
      res.set_content(body, "application/octet-stream");
    });
  });
  s.Delete(R"(/objects/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string path = req.matches[1];
      validate_path(path);
      cloud_->remove(req.get_header_value(kAccountHeader), path);
      res.set_content("{}", "application/json");
    });
  });
  s.Get("/list", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto entries = cloud_->list(req.get_header_value(kAccountHeader), req.get_param_value("prefix"));
      json arr = json::array();
      for (const auto& e : entries) arr.push_back(entry_json(e));
      res.set_content(arr.dump(), "application/json");
    });
  });
  s.Post("/share", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto j = json::parse(req.body);
      cloud_->share(req.get_header_value(kAccountHeader), j.at("prefix").get<std::string>(),
                    j.at("peer").get<std::string>());
      res.set_content("{}", "application/json");
    });
  });
}

int CloudService::start(const std::string& host, int port) {
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) fail(ErrorCode::kBindFailure, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void CloudService::run(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->bind_to_port(host, port)) fail(ErrorCode::kBindFailure, "cannot bind " + host + ":" + std::to_string(port));
  server_->listen_after_bind();
}

void CloudService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string CloudService::url() const { return "http://" + host_ + ":" + std::to_string(port_); }

HttpSimulatedBackend::HttpSimulatedBackend(BackendHandle handle) : Backend(std::move(handle)) {
  std::string rest = this->handle().root.substr(std::string("http://").size());
  rest = rest.substr(0, rest.find('/'));
  const auto colon = rest.rfind(':');
  if (colon == std::string::npos) fail(ErrorCode::kInvalidArgument, "cloud URL needs host:port");
  host_ = rest.substr(0, colon);
  port_ = std::stoi(rest.substr(colon + 1));
}

namespace {

httplib::Client make_client(const std::string& host, int port) {
  httplib::Client c(host, port);
  c.set_connection_timeout(2, 0);
  c.set_read_timeout(10, 0);
  c.set_write_timeout(10, 0);
  return c;
}

}  // namespace

RemoteEntry HttpSimulatedBackend::do_put(const std::string& path, ByteView data) {
  auto c = make_client(host_, port_);
  auto res = c.Put("/objects/" + path, {{kAccountHeader, handle().account}},
                   std::string(data.begin(), data.end()), "application/octet-stream");
  if (!res || res->status != 200) raise_from(res, "put " + path);
  return entry_from(json::parse(res->body));
}

RangedRead HttpSimulatedBackend::do_get(const std::string& path, const std::vector<ByteRange>& ranges) {
  std::string query;
  for (const auto& r : ranges) {
    query += query.empty() ? "?" : "&";
    query += "range=" + std::to_string(r.offset) + "-";
    if (r.length != kToEnd) query += std::to_string(r.offset + r.length);
  }
  auto c = make_client(host_, port_);
  auto res = c.Get("/objects/" + path + query, {{kAccountHeader, handle().account}});
  if (!res || res->status != 200) raise_from(res, "get " + path);
  RangedRead out;
  out.entry = {path, std::stoull(res->get_header_value("X-Snet-Size")),
               std::stoll(res->get_header_value("X-Snet-Mtime")), std::stoull(res->get_header_value("X-Snet-Version"))};
  const auto sizes = res->get_header_value("X-Snet-Parts");
  std::size_t pos = 0, start = 0;
  while (start <= sizes.size() && !sizes.empty()) {
    auto comma = sizes.find(',', start);
    if (comma == std::string::npos) comma = sizes.size();
    const auto n = std::stoull(sizes.substr(start, comma - start));
    if (pos + n > res->body.size()) fail(ErrorCode::kIoFailure, "short ranged response");
    out.parts.emplace_back(res->body.begin() + pos, res->body.begin() + pos + n);
    pos += n;
    start = comma + 1;
  }
  return out;
}

std::vector<RemoteEntry> HttpSimulatedBackend::do_list(const std::string& prefix) {
  auto c = make_client(host_, port_);
  auto res = c.Get("/list", httplib::Params{{"prefix", prefix}}, {{kAccountHeader, handle().account}});
  if (!res || res->status != 200) raise_from(res, "list " + prefix);
  std::vector<RemoteEntry> out;
  for (const auto& j : json::parse(res->body)) out.push_back(entry_from(j));
  return out;
}

void HttpSimulatedBackend::do_delete(const std::string& path) {
  auto c = make_client(host_, port_);
  auto res = c.Delete("/objects/" + path, {{kAccountHeader, handle().account}});
  if (!res || res->status != 200) raise_from(res, "delete " + path);
}

void HttpSimulatedBackend::do_share(const std::string& prefix, const std::string& peer_account) {
  auto c = make_client(host_, port_);
  auto res = c.Post("/share", {{kAccountHeader, handle().account}},
                    json{{"prefix", prefix}, {"peer", peer_account}}.dump(), "application/json");
  if (!res || res->status != 200) raise_from(res, "share " + prefix);
}

}  // namespace snet::backend
