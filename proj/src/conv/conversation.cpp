#include "snet/conv/conversation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <json.hpp>

#include "snet/codec/sharing.hpp"
#include "snet/error.hpp"

namespace snet::conv {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kDeviceFile = "device.json";
constexpr const char* kConversationFile = "conversation.json";
constexpr const char* kMediaDir = "media";

void write_private(const fs::path& path, const std::string& text) {
  write_file_atomic(path, to_bytes(text));
  fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
}

json load_json(const fs::path& path, ErrorCode missing) {
  if (!fs::exists(path)) fail(missing, path.string() + " not found");
  try {
    return json::parse(to_string(read_file(path)));
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfigInvalid, path.string() + ": " + e.what());
  }
}

json config_to_json(const ConversationConfig& c) {
  return {{"conv_token", c.conv_token},
          {"self", c.self},
          {"members", c.members},
          {"scheme", scheme_spec(c.scheme, true)},
          {"modulus_secret", c.scheme.modulus_secret},
          {"conv_secret", hex_encode(c.conv_secret)},
          {"backends", c.backend_labels},
          {"created_ms", c.created_ms}};
}

ConversationConfig config_from_json(const json& j) {
  ConversationConfig c;
  try {
    c.conv_token = j.at("conv_token").get<std::string>();
    c.self = j.at("self").get<std::string>();
    c.members = j.at("members").get<std::vector<std::string>>();
    SeededRandom unused(0);
    c.scheme = parse_scheme_spec(j.at("scheme").get<std::string>(), unused);
    c.scheme.modulus_secret = j.value("modulus_secret", false);
    c.conv_secret = hex_decode(j.at("conv_secret").get<std::string>());
    c.backend_labels = j.at("backends").get<std::vector<std::string>>();
    c.created_ms = j.value("created_ms", std::int64_t{0});
  } catch (const json::exception& e) {
    fail(ErrorCode::kCorruptState, std::string("conversation config: ") + e.what());
  }
  return c;
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string manifest_path(const std::string& conv_token) { return conv_token + "/" + std::string(sync::kManifestName); }

}  // namespace

bool is_member_token(std::string_view token) {
  return token.size() == 16 &&
         std::all_of(token.begin(), token.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

std::string new_member_token(RandomSource& rnd) { return hex_encode(rnd.bytes(8)); }

// ---- device -----------------------------------------------------------------

Device Device::init(const fs::path& data_dir, RandomSource& rnd) {
  if (fs::exists(data_dir / kDeviceFile)) return open(data_dir);
  Device d;
  d.data_dir_ = data_dir;
  d.token_ = new_member_token(rnd);
  fs::create_directories(data_dir / "conversations");
  d.save();
  return d;
}

Device Device::open(const fs::path& data_dir) {
  const auto j = load_json(data_dir / kDeviceFile, ErrorCode::kConfigInvalid);
  Device d;
  d.data_dir_ = data_dir;
  try {
    d.token_ = j.at("member_token").get<std::string>();
    for (const auto& b : j.value("backends", json::array())) {
      d.backends_.push_back({b.at("label").get<std::string>(),
                             backend::parse_backend_kind(b.at("kind").get<std::string>()),
                             b.at("root").get<std::string>(), b.value("account", d.token_)});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfigInvalid, std::string("device config: ") + e.what());
  }
  if (!is_member_token(d.token_)) fail(ErrorCode::kConfigInvalid, "device config holds a malformed member token");
  return d;
}

const backend::BackendHandle& Device::backend(const std::string& label) const {
  for (const auto& b : backends_) {
    if (b.label == label) return b;
  }
  fail(ErrorCode::kConfigInvalid, "backend '" + label + "' is not configured on this device");
}

void Device::add_backend(backend::BackendHandle handle) {
  if (handle.label.empty()) fail(ErrorCode::kConfigInvalid, "backend label must not be empty");
  if (handle.account.empty()) handle.account = token_;
  auto it = std::find_if(backends_.begin(), backends_.end(), [&](const auto& b) { return b.label == handle.label; });
  if (it != backends_.end()) {
    *it = std::move(handle);
  } else {
    backends_.push_back(std::move(handle));
  }
  save();
}

void Device::save() const {
  json backends = json::array();
  for (const auto& b : backends_) {
    backends.push_back({{"label", b.label},
                        {"kind", std::string(backend::backend_kind_name(b.kind))},
                        {"root", b.root},
                        {"account", b.account}});
  }
  write_private(data_dir_ / kDeviceFile, json{{"member_token", token_}, {"backends", backends}}.dump(2));
}

fs::path Device::conversation_dir(const std::string& conv_token) const {
  return data_dir_ / "conversations" / conv_token;
}

std::vector<std::string> Device::conversations() const {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& d : fs::directory_iterator(data_dir_ / "conversations", ec)) {
    if (fs::exists(d.path() / kConversationFile)) out.push_back(d.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Env system_env() {
  static SystemClock clock;
  static SecureRandom rnd;
  return {&clock, &rnd};
}

MemberSpec parse_member_spec(std::string_view text) {
  MemberSpec m;
  const auto at = text.find('@');
  m.token = std::string(text.substr(0, at));
  if (at != std::string_view::npos) m.account = std::string(text.substr(at + 1));
  if (!is_member_token(m.token)) fail(ErrorCode::kInvalidArgument, "'" + m.token + "' is not a member token");
  if (m.account.empty()) m.account = m.token;
  return m;
}

// ---- cursor -----------------------------------------------------------------

std::string Cursor::encode() const {
  if (timestamp_ms < 0) return "";
  return std::to_string(timestamp_ms) + "." + sender + "." + std::to_string(seq);
}

Cursor Cursor::parse(std::string_view text) {
  if (text.empty()) return {};
  const auto a = text.find('.');
  const auto b = text.rfind('.');
  Cursor c;
  auto num = [&](std::string_view s, auto& out) {
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
      fail(ErrorCode::kInvalidArgument, "malformed cursor '" + std::string(text) + "'");
    }
  };
  if (a == std::string_view::npos || a == b) fail(ErrorCode::kInvalidArgument, "malformed cursor '" + std::string(text) + "'");
  num(text.substr(0, a), c.timestamp_ms);
  c.sender = std::string(text.substr(a + 1, b - a - 1));
  num(text.substr(b + 1), c.seq);
  return c;
}

// ---- conversation -----------------------------------------------------------

Conversation::Conversation(const Device& device, ConversationConfig config, Env env)
    : config_(std::move(config)),
      dir_(device.conversation_dir(config_.conv_token)),
      local_dir_(dir_ / "D"),
      env_(env) {
  if (config_.backend_labels.size() != config_.scheme.shares()) {
    fail(ErrorCode::kInvalidConfig, "scheme needs " + std::to_string(config_.scheme.shares()) + " backends, got " +
                                        std::to_string(config_.backend_labels.size()));
  }
  for (const auto& label : config_.backend_labels) backends_.push_back(backend::open_backend(device.backend(label)));
  fs::create_directories(local_dir_ / kMediaDir);
  const auto own = local_dir_ / (config_.self + ".log");
  if (!fs::exists(own)) write_file_atomic(own, {});
  for (const auto& r : decode_records(read_file(own))) last_own_ts_ = std::max(last_own_ts_, r.timestamp_ms);

  sync::SyncContext ctx;
  ctx.conv_token = config_.conv_token;
  ctx.self = config_.self;
  ctx.members = {config_.members.begin(), config_.members.end()};
  ctx.scheme = config_.scheme;
  ctx.conv_secret = config_.conv_secret;
  for (auto& b : backends_) ctx.backends.push_back(b.get());
  ctx.local_dir = local_dir_;
  ctx.state_dir = dir_ / "state";
  ctx.clock = env_.clock;
  ctx.rnd = env_.rnd;
  engine_ = std::make_unique<sync::SyncEngine>(std::move(ctx));
}

std::unique_ptr<Conversation> Conversation::open(const Device& device, const std::string& conv_token, Env env) {
  const auto file = device.conversation_dir(conv_token) / kConversationFile;
  if (!fs::exists(file)) fail(ErrorCode::kUnknownConversation, "no conversation " + conv_token);
  return std::make_unique<Conversation>(device, config_from_json(load_json(file, ErrorCode::kUnknownConversation)), env);
}

void Conversation::write_config() const {
  write_private(dir_ / kConversationFile, config_to_json(config_).dump(2));
}

MessageRecord Conversation::append_message(ContentType type, ByteView body, std::optional<std::int64_t> now_ms) {
  if (!std::binary_search(config_.members.begin(), config_.members.end(), config_.self)) {
    fail(ErrorCode::kNotAMember, config_.self + " is not a member of " + config_.conv_token);
  }
  if (body.empty()) fail(ErrorCode::kInvalidArgument, "message body must not be empty");
  std::lock_guard lock(engine_mutex_);
  MessageRecord rec;
  rec.timestamp_ms = std::max(now_ms.value_or(env_.clock->now_ms()), last_own_ts_);
  rec.type = type;
  if (type == ContentType::kMediaRef) {
    const std::string rel = std::string(kMediaDir) + "/" + config_.self + "-" + hex_encode(env_.rnd->bytes(8));
    write_file_atomic(local_dir_ / rel, body);
    rec.body = to_bytes(rel);
  } else {
    rec.body.assign(body.begin(), body.end());
  }
  const auto framed = encode_record(rec);
  std::ofstream out(local_dir_ / (config_.self + ".log"), std::ios::binary | std::ios::app);
  out.write(reinterpret_cast<const char*>(framed.data()), static_cast<std::streamsize>(framed.size()));
  out.flush();
  if (!out) fail(ErrorCode::kIoFailure, "cannot append to own log");
  last_own_ts_ = rec.timestamp_ms;
  return rec;
}

std::vector<Message> Conversation::read_messages(const Cursor& after) const {
  std::vector<Message> out;
  for (const auto& member : config_.members) {
    const auto file = local_dir_ / (member + ".log");
    std::error_code ec;
    if (!fs::exists(file, ec)) continue;
    Bytes data;
    try {
      data = read_file(file);
    } catch (const Error&) {
      continue;  // replaced mid-read by a sync cycle
    }
    std::uint64_t seq = 0;
    for (auto& r : decode_records(data)) {
      Message m{member, seq++, std::move(r)};
      if (m.cursor() > after) out.push_back(std::move(m));
    }
  }
  std::sort(out.begin(), out.end(), [](const Message& a, const Message& b) { return a.cursor() < b.cursor(); });
  return out;
}

std::vector<Message> Conversation::read_messages_since(std::int64_t since_ms) const {
  // Every record at since_ms sorts at or below this cursor.
  return read_messages(Cursor{since_ms, std::string(1, '\x7f'), 0});
}

Bytes Conversation::read_media(const std::string& rel_path) const {
  if (!sync::is_media_path(rel_path)) fail(ErrorCode::kInvalidPath, "'" + rel_path + "' is not a media path");
  backend::validate_path(rel_path);
  const auto file = local_dir_ / rel_path;
  if (!fs::exists(file)) fail(ErrorCode::kNotFound, rel_path + " has not arrived yet");
  return read_file(file);
}

sync::SyncReport Conversation::sync() {
  std::lock_guard lock(engine_mutex_);
  auto r = engine_->sync_cycle();
  last_report_ = r;
  return r;
}

std::optional<sync::SyncReport> Conversation::last_report() const {
  std::lock_guard lock(engine_mutex_);
  return last_report_;
}

std::vector<backend::Backend*> Conversation::backends() const {
  std::vector<backend::Backend*> out;
  for (const auto& b : backends_) out.push_back(b.get());
  return out;
}

// ---- lifecycle --------------------------------------------------------------

Created create_conversation(const Device& device, const std::vector<MemberSpec>& members,
                            const codec::SchemeConfig& scheme, const std::vector<std::string>& backend_labels,
                            Env env) {
  scheme.validate();
  if (backend_labels.size() != scheme.shares()) {
    fail(ErrorCode::kInvalidConfig, "scheme needs " + std::to_string(scheme.shares()) + " backends, got " +
                                        std::to_string(backend_labels.size()));
  }
  if (sorted_unique(backend_labels).size() != backend_labels.size()) {
    fail(ErrorCode::kInvalidConfig, "each share needs its own backend");
  }
  std::vector<std::unique_ptr<backend::Backend>> stores;
  for (const auto& label : backend_labels) stores.push_back(backend::open_backend(device.backend(label)));

  ConversationConfig cfg;
  cfg.conv_token = hex_encode(env.rnd->bytes(16));
  cfg.self = device.member_token();
  cfg.scheme = scheme;
  cfg.conv_secret = env.rnd->bytes(32);
  cfg.backend_labels = backend_labels;
  cfg.created_ms = env.clock->now_ms();
  std::vector<std::string> tokens{cfg.self};
  for (const auto& m : members) {
    if (!is_member_token(m.token)) fail(ErrorCode::kInvalidArgument, "'" + m.token + "' is not a member token");
    tokens.push_back(m.token);
  }
  cfg.members = sorted_unique(tokens);
  if (fs::exists(device.conversation_dir(cfg.conv_token))) {
    fail(ErrorCode::kDuplicateConversation, "conversation " + cfg.conv_token + " already exists");
  }

  const Manifest manifest{cfg.conv_token, cfg.members, scheme_spec(scheme, false), cfg.created_ms};
  const auto text = manifest_text(manifest, cfg.conv_secret);
  const auto shares = codec::xor_split(to_bytes(text), static_cast<unsigned>(stores.size()), *env.rnd);
  for (std::size_t i = 0; i < stores.size(); ++i) {
    stores[i]->put_object(manifest_path(cfg.conv_token), shares.shares[i].payload);
  }
  for (const auto& m : members) {
    if (m.token == cfg.self) continue;
    for (auto& s : stores) s->share_directory(cfg.conv_token, m.account.empty() ? m.token : m.account);
  }

  const auto dir = device.conversation_dir(cfg.conv_token);
  fs::create_directories(dir / "D");
  write_file_atomic(dir / "D" / std::string(sync::kManifestName), to_bytes(text));
  auto conv = std::make_unique<Conversation>(device, cfg, env);
  conv->write_config();
  Invitation inv{cfg.conv_token, cfg.scheme, cfg.conv_secret, cfg.backend_labels};
  return {std::move(conv), encode_invitation(inv)};
}

std::unique_ptr<Conversation> join_conversation(const Device& device, std::string_view code, Env env) {
  const auto inv = decode_invitation(code);
  if (fs::exists(device.conversation_dir(inv.conv_token) / kConversationFile)) {
    fail(ErrorCode::kDuplicateConversation, "already joined " + inv.conv_token);
  }
  if (inv.backend_labels.size() != inv.scheme.shares()) {
    fail(ErrorCode::kInvalidCode, "invitation names " + std::to_string(inv.backend_labels.size()) + " backends for " +
                                      std::to_string(inv.scheme.shares()) + " shares");
  }
  codec::ShareSet ss;
  ss.scheme = codec::SchemeConfig::xor_scheme(static_cast<unsigned>(inv.backend_labels.size()));
  for (std::size_t i = 0; i < inv.backend_labels.size(); ++i) {
    auto store = backend::open_backend(device.backend(inv.backend_labels[i]));
    try {
      auto [bytes, entry] = store->get_object(manifest_path(inv.conv_token));
      ss.shares.push_back({static_cast<unsigned>(i + 1), std::move(bytes)});
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNotFound || e.code() == ErrorCode::kNotYetVisible ||
          e.code() == ErrorCode::kAccessDenied) {
        fail(ErrorCode::kManifestMissing, "manifest share on '" + inv.backend_labels[i] + "' not readable yet: " +
                                              e.detail());
      }
      throw;
    }
  }
  for (const auto& s : ss.shares) {
    if (s.payload.size() != ss.shares[0].payload.size()) {
      fail(ErrorCode::kCodeMismatch, "manifest shares disagree in length");
    }
  }
  ss.plaintext_len = ss.shares[0].payload.size();
  const auto text = to_string(codec::xor_reconstruct(ss));
  Manifest m;
  try {
    m = parse_manifest(text, inv.conv_secret);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptState) fail(ErrorCode::kCodeMismatch, e.detail());
    throw;
  }
  if (m.conv_token != inv.conv_token || m.scheme != scheme_spec(inv.scheme, false)) {
    fail(ErrorCode::kCodeMismatch, "manifest does not describe the invited conversation");
  }
  if (!std::binary_search(m.members.begin(), m.members.end(), device.member_token())) {
    fail(ErrorCode::kNotAMember, device.member_token() + " is not listed in conversation " + m.conv_token);
  }

  ConversationConfig cfg;
  cfg.conv_token = inv.conv_token;
  cfg.self = device.member_token();
  cfg.members = m.members;
  cfg.scheme = inv.scheme;
  cfg.conv_secret = inv.conv_secret;
  cfg.backend_labels = inv.backend_labels;
  cfg.created_ms = m.created_ms;
  const auto dir = device.conversation_dir(cfg.conv_token);
  fs::create_directories(dir / "D");
  write_file_atomic(dir / "D" / std::string(sync::kManifestName), to_bytes(text));
  auto conv = std::make_unique<Conversation>(device, cfg, env);
  conv->write_config();
  conv->sync();
  return conv;
}

}  // namespace snet::conv
