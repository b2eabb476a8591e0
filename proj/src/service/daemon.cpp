#include "snet/service/daemon.hpp"

#include <httplib.h>

#include <chrono>
#include <json.hpp>

#include "snet/crypto.hpp"
#include "snet/error.hpp"

namespace snet::service {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kAuthHeader = "X-Auth-Token";
constexpr const char* kTokenPattern = "([0-9a-f]{32})";

std::int64_t steady_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidCode:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidPath:
    case ErrorCode::kConfigInvalid: return 400;
    case ErrorCode::kNotAMember:
    case ErrorCode::kAccessDenied: return 403;
    case ErrorCode::kUnknownConversation:
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kManifestMissing:
    case ErrorCode::kCodeMismatch:
    case ErrorCode::kDuplicateConversation:
    case ErrorCode::kUnknownPeer: return 409;
    case ErrorCode::kQuotaExceeded: return 507;
    case ErrorCode::kBackendUnavailable: return 503;
    default: return 500;
  }
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& detail) {
  reply(res, status, {{"error", code}, {"detail", detail}});
}

// Wraps a handler so every failure leaves as the JSON error envelope.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply_error(res, http_status(e.code()), error_code_name(e.code()), e.detail());
    } catch (const json::exception& e) {
      reply_error(res, 400, error_code_name(ErrorCode::kInvalidArgument), e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, error_code_name(ErrorCode::kIoFailure), e.what());
    }
  };
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto j = json::parse(req.body);
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  return j;
}

json message_json(const conv::Message& m) {
  json j{{"cursor", m.cursor().encode()},
         {"sender", m.sender},
         {"seq", m.seq},
         {"timestamp_ms", m.record.timestamp_ms},
         {"content_type", conv::content_type_name(m.record.type)},
         {"body_b64", crypto::base64_encode(m.record.body)}};
  if (m.record.type == conv::ContentType::kTextUtf8) j["text"] = to_string(m.record.body);
  if (m.record.type == conv::ContentType::kMediaRef) j["media_path"] = to_string(m.record.body);
  return j;
}

json conversation_json(const conv::Conversation& c) {
  const auto& cfg = c.config();
  return {{"conv_token", cfg.conv_token},
          {"self", cfg.self},
          {"members", cfg.members},
          {"scheme", conv::scheme_spec(cfg.scheme, false)},
          {"backends", cfg.backend_labels},
          {"created_ms", cfg.created_ms}};
}

json report_json(const sync::SyncReport& r) {
  json actions = json::array();
  for (const auto& a : r.actions) actions.push_back({{"path", a.path}, {"action", sync::action_name(a.action)}});
  return {{"actions", actions},     {"waiting", r.waiting}, {"conflicts", r.conflicts}, {"errors", r.errors},
          {"uploads", r.uploads},   {"downloads", r.downloads}, {"deletes", r.deletes}, {"repairs", r.repairs},
          {"received", r.received}};
}

}  // namespace

void validate(const DaemonConfig& cfg) {
  if (cfg.host != "127.0.0.1" && cfg.host != "localhost" && cfg.host != "::1") {
    fail(ErrorCode::kConfigInvalid, "refusing to listen on non-loopback address '" + cfg.host + "'");
  }
  if (cfg.port < 0 || cfg.port > 65535) fail(ErrorCode::kConfigInvalid, "port out of range");
  if (cfg.poll_interval_ms <= 0) fail(ErrorCode::kConfigInvalid, "poll interval must be positive");
  if (cfg.long_poll_ms < 0) fail(ErrorCode::kConfigInvalid, "long-poll hold must not be negative");
  if (cfg.data_dir.empty()) fail(ErrorCode::kConfigInvalid, "data directory required");
}

std::string ensure_auth_token(const fs::path& file, RandomSource& rnd) {
  if (fs::exists(file)) {
    auto text = to_string(read_file(file));
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    if (text.size() != 64) fail(ErrorCode::kConfigInvalid, file.string() + " does not hold a 256-bit token");
    return text;
  }
  const auto token = hex_encode(rnd.bytes(32));
  write_file_atomic(file, to_bytes(token + "\n"));
  fs::permissions(file, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
  return token;
}

Daemon::Daemon(DaemonConfig cfg, conv::Env env) : cfg_(std::move(cfg)), env_(env) {
  validate(cfg_);
  device_ = conv::Device::init(cfg_.data_dir, *env_.rnd);
  token_ = ensure_auth_token(cfg_.token_file.empty() ? cfg_.data_dir / "auth_token" : cfg_.token_file, *env_.rnd);
  for (const auto& b : device_.backends()) {
    // Any request makes the account known to the provider, so peers can grant it.
    try {
      backend::open_backend(b)->list_objects("");
      backend_status_[b.label] = "SYNCED";
    } catch (const Error&) {
      backend_status_[b.label] = "ERROR";
    }
  }
  for (const auto& token : device_.conversations()) {
    convs_[token] = conv::Conversation::open(device_, token, env_);
  }
}

Daemon::~Daemon() { stop(); }

int Daemon::start() {
  server_ = std::make_unique<httplib::Server>();
  install_routes();
  port_ = cfg_.port == 0 ? server_->bind_to_any_port(cfg_.host)
                         : (server_->bind_to_port(cfg_.host, cfg_.port) ? cfg_.port : -1);
  if (port_ <= 0) fail(ErrorCode::kBindFailure, "cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
  owner_thread_ = std::thread([this] { owner_loop(); });
  http_thread_ = std::thread([this] { server_->listen_after_bind(); });
  // stop() before the listener is up would be lost.
  server_->wait_until_ready();
  return port_;
}

void Daemon::stop() {
  if (stopping_.exchange(true)) {
    // Second caller: wait for the first to finish.
    std::unique_lock lk(stop_mu_);
    stop_cv_.wait(lk, [&] { return stopped_; });
    return;
  }
  notify_messages();
  if (server_) server_->stop();
  if (http_thread_.joinable()) http_thread_.join();
  {
    std::lock_guard lk(queue_mu_);
    owner_stop_ = true;
  }
  queue_cv_.notify_all();
  if (owner_thread_.joinable()) owner_thread_.join();
  {
    std::lock_guard lk(stop_mu_);
    stopped_ = true;
  }
  stop_cv_.notify_all();
}

void Daemon::wait() {
  std::unique_lock lk(stop_mu_);
  stop_cv_.wait(lk, [&] { return stopped_; });
}

template <typename F>
auto Daemon::submit(F&& fn) -> decltype(fn()) {
  using R = decltype(fn());
  auto task = std::make_shared<std::packaged_task<R()>>(std::forward<F>(fn));
  auto result = task->get_future();
  {
    std::lock_guard lk(queue_mu_);
    if (owner_done_) fail(ErrorCode::kBackendUnavailable, "daemon is shutting down");
    queue_.push_back([task] { (*task)(); });
  }
  queue_cv_.notify_all();
  return result.get();
}

void Daemon::request_cycle() {
  {
    std::lock_guard lk(queue_mu_);
    cycle_requested_ = true;
  }
  queue_cv_.notify_all();
}

void Daemon::notify_messages() {
  {
    std::lock_guard lk(msg_mu_);
    ++msg_generation_;
  }
  msg_cv_.notify_all();
}

void Daemon::owner_loop() {
  auto next = steady_ms();
  std::unique_lock lk(queue_mu_);
  for (;;) {
    queue_cv_.wait_until(lk, std::chrono::steady_clock::time_point(std::chrono::milliseconds(next)),
                         [&] { return owner_stop_ || !queue_.empty() || cycle_requested_; });
    while (!queue_.empty()) {
      auto cmd = std::move(queue_.front());
      queue_.pop_front();
      lk.unlock();
      cmd();
      lk.lock();
    }
    if (owner_stop_) break;
    if (cycle_requested_ || steady_ms() >= next) {
      cycle_requested_ = false;
      lk.unlock();
      run_cycle();
      lk.lock();
      next = steady_ms() + cfg_.poll_interval_ms;
    }
  }
  owner_done_ = true;
  while (!queue_.empty()) {
    auto cmd = std::move(queue_.front());
    queue_.pop_front();
    lk.unlock();
    cmd();
    lk.lock();
  }
}

void Daemon::run_cycle() {
  const auto t0 = steady_ms();
  std::vector<std::shared_ptr<conv::Conversation>> convs;
  {
    std::shared_lock lk(convs_mu_);
    for (const auto& [token, c] : convs_) convs.push_back(c);
  }
  std::map<std::string, std::string> status;
  for (const auto& b : device_.backends()) status[b.label] = "SYNCED";
  bool received = false;
  for (const auto& c : convs) {
    sync::SyncReport r;
    try {
      r = c->sync();
    } catch (const Error& e) {
      r.errors.push_back(e.what());
    }
    received = received || !r.received.empty();
    for (const auto& label : c->config().backend_labels) {
      auto& s = status[label];
      for (const auto& err : r.errors) {
        if (err.find("backend " + label + " unavailable") != std::string::npos) s = "ERROR";
      }
      if (s == "SYNCED" && !r.waiting.empty()) s = "WAITING";
    }
  }
  {
    std::lock_guard lk(status_mu_);
    last_cycle_ms_ = steady_ms() - t0;
    last_cycle_at_ms_ = env_.clock->now_ms();
    ++cycles_;
    backend_status_ = std::move(status);
  }
  if (received) notify_messages();
}

std::shared_ptr<conv::Conversation> Daemon::find(const std::string& conv_token) const {
  std::shared_lock lk(convs_mu_);
  auto it = convs_.find(conv_token);
  if (it == convs_.end()) fail(ErrorCode::kUnknownConversation, "no conversation " + conv_token);
  return it->second;
}

void Daemon::install_routes() {
  auto& s = *server_;
  s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (req.path.rfind("/v1/", 0) != 0) return httplib::Server::HandlerResponse::Unhandled;
    const auto got = req.get_header_value(kAuthHeader);
    const auto expect = crypto::sha256(to_bytes(token_));
    if (got.empty() || crypto::sha256(to_bytes(got)) != expect) {
      reply_error(res, 401, "unauthorized", "missing or wrong X-Auth-Token");
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  s.Get("/v1/status", guarded([this](const httplib::Request&, httplib::Response& res) {
    json backends = json::array();
    std::shared_lock clk(convs_mu_);
    const auto n = convs_.size();
    clk.unlock();
    std::lock_guard lk(status_mu_);
    for (const auto& b : device_.backends()) {
      auto it = backend_status_.find(b.label);
      backends.push_back({{"label", b.label},
                          {"kind", backend::backend_kind_name(b.kind)},
                          {"status", it == backend_status_.end() ? "SYNCED" : it->second}});
    }
    reply(res, 200,
          {{"member_token", device_.member_token()},
           {"backends", backends},
           {"conversations", n},
           {"last_cycle_ms", last_cycle_ms_},
           {"last_cycle_at_ms", last_cycle_at_ms_},
           {"cycles", cycles_}});
  }));

  s.Get("/v1/conversations", guarded([this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    std::shared_lock lk(convs_mu_);
    for (const auto& [token, c] : convs_) out.push_back(conversation_json(*c));
    reply(res, 200, {{"conversations", out}});
  }));

  s.Post("/v1/conversations", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_of(req);
    std::vector<conv::MemberSpec> members;
    for (const auto& m : body.value("members", json::array())) members.push_back(conv::parse_member_spec(m.get<std::string>()));
    const auto spec = body.at("scheme").get<std::string>();
    const auto labels = body.at("backends").get<std::vector<std::string>>();
    auto created = submit([&] {
      auto c = conv::create_conversation(device_, members, conv::parse_scheme_spec(spec, *env_.rnd), labels, env_);
      std::shared_ptr<conv::Conversation> shared = std::move(c.conversation);
      {
        std::unique_lock lk(convs_mu_);
        convs_[shared->config().conv_token] = shared;
      }
      return std::make_pair(shared->config().conv_token, c.invitation_code);
    });
    request_cycle();
    reply(res, 201, {{"conv_token", created.first}, {"invitation_code", created.second}});
  }));

  s.Post("/v1/conversations/join", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto code = body_of(req).at("invitation_code").get<std::string>();
    auto joined = submit([&] {
      std::shared_ptr<conv::Conversation> c = conv::join_conversation(device_, code, env_);
      std::unique_lock lk(convs_mu_);
      convs_[c->config().conv_token] = c;
      return c;
    });
    notify_messages();
    reply(res, 200, conversation_json(*joined));
  }));

  const std::string conv_path = std::string("/v1/conversations/") + kTokenPattern;

  s.Get(conv_path + "/messages", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto c = find(req.matches[1]);
    const auto cursor = conv::Cursor::parse(req.get_param_value("since"));
    const bool wait = req.get_param_value("wait") == "1";
    const auto deadline = steady_ms() + cfg_.long_poll_ms;
    std::vector<conv::Message> msgs;
    for (;;) {
      std::uint64_t gen;
      {
        std::lock_guard lk(msg_mu_);
        gen = msg_generation_;
      }
      msgs = c->read_messages(cursor);
      if (!msgs.empty() || !wait || stopping_ || steady_ms() >= deadline) break;
      std::unique_lock lk(msg_mu_);
      const auto until = std::min(deadline, steady_ms() + 250);
      msg_cv_.wait_until(lk, std::chrono::steady_clock::time_point(std::chrono::milliseconds(until)),
                         [&] { return msg_generation_ != gen || stopping_.load(); });
    }
    json out = json::array();
    for (const auto& m : msgs) out.push_back(message_json(m));
    reply(res, 200, {{"messages", out}, {"cursor", msgs.empty() ? cursor.encode() : msgs.back().cursor().encode()}});
  }));

  s.Post(conv_path + "/messages", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto c = find(req.matches[1]);
    const auto body = body_of(req);
    const auto type = conv::parse_content_type(body.value("content_type", std::string("TEXT_UTF8")));
    Bytes payload;
    if (body.contains("body_b64")) {
      payload = crypto::base64_decode(body.at("body_b64").get<std::string>());
    } else if (body.contains("text")) {
      payload = to_bytes(body.at("text").get<std::string>());
    }
    auto rec = submit([&] { return c->append_message(type, payload); });
    notify_messages();
    request_cycle();
    // The record's position: it is the newest entry of this member's log.
    const auto own = c->read_messages(conv::Cursor{rec.timestamp_ms - 1, "", 0});
    std::string cursor;
    for (const auto& m : own) {
      if (m.sender == c->config().self && m.record == rec) cursor = m.cursor().encode();
    }
    reply(res, 201, {{"cursor", cursor}, {"timestamp_ms", rec.timestamp_ms},
                     {"content_type", conv::content_type_name(rec.type)}, {"body_b64", crypto::base64_encode(rec.body)}});
  }));

  s.Get(conv_path + "/media", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto c = find(req.matches[1]);
    const auto bytes = c->read_media(req.get_param_value("path"));
    res.status = 200;
    res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(), "application/octet-stream");
  }));

  s.Post("/v1/sync", guarded([this](const httplib::Request&, httplib::Response& res) {
    auto reports = submit([&] {
      run_cycle();
      json out = json::object();
      std::shared_lock lk(convs_mu_);
      for (const auto& [token, c] : convs_) {
        if (auto r = c->last_report()) out[token] = report_json(*r);
      }
      return out;
    });
    reply(res, 200, {{"reports", reports}});
  }));

  if (!cfg_.ui_dir.empty() && fs::is_directory(cfg_.ui_dir)) s.set_mount_point("/ui", cfg_.ui_dir.string());
}

}  // namespace snet::service
