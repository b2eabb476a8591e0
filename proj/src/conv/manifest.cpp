#include "snet/conv/manifest.hpp"

#include <charconv>
#include <sstream>

#include "snet/crypto.hpp"
#include "snet/error.hpp"

namespace snet::conv {
namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto at = s.find(sep, start);
    out.emplace_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) return out;
    start = at + 1;
  }
}

std::uint64_t number(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    fail(ErrorCode::kInvalidConfig, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

codec::SchemeConfig parse_scheme_spec(std::string_view spec, RandomSource& rnd) {
  const auto parts = split(spec, ':');
  const auto kind = codec::parse_scheme_kind(parts[0]);
  codec::SchemeConfig s;
  const auto arity = [&](std::initializer_list<std::size_t> ok) {
    for (auto n : ok) {
      if (parts.size() == n) return;
    }
    fail(ErrorCode::kInvalidConfig, "malformed scheme spec '" + std::string(spec) + "'");
  };
  switch (kind) {
    case codec::SchemeKind::kXor:
      arity({2});
      s = codec::SchemeConfig::xor_scheme(static_cast<unsigned>(number(parts[1], "k")));
      break;
    case codec::SchemeKind::kAdditive:
      arity({3, 4});
      if (parts[2] == "unknown") {
        arity({3});
        s = codec::SchemeConfig::additive_unknown_modulus(static_cast<unsigned>(number(parts[1], "k")), rnd);
      } else {
        arity({4});
        s = codec::SchemeConfig::additive(static_cast<unsigned>(number(parts[1], "k")), number(parts[2], "N"),
                                          static_cast<unsigned>(number(parts[3], "block")));
      }
      break;
    case codec::SchemeKind::kShamir:
      arity({3, 5});
      if (parts.size() == 3) {
        s = codec::SchemeConfig::shamir(static_cast<unsigned>(number(parts[1], "t")),
                                        static_cast<unsigned>(number(parts[2], "n")));
      } else {
        s = codec::SchemeConfig::shamir(static_cast<unsigned>(number(parts[1], "t")),
                                        static_cast<unsigned>(number(parts[2], "n")), number(parts[3], "p"),
                                        static_cast<unsigned>(number(parts[4], "block")));
      }
      break;
  }
  s.validate();
  return s;
}

std::string scheme_spec(const codec::SchemeConfig& s, bool with_secret) {
  const std::string name(codec::scheme_kind_name(s.kind));
  switch (s.kind) {
    case codec::SchemeKind::kXor: return name + ":" + std::to_string(s.share_count);
    case codec::SchemeKind::kAdditive: {
      const std::string n = s.modulus_secret && !with_secret ? "?" : std::to_string(s.modulus);
      return name + ":" + std::to_string(s.share_count) + ":" + n + ":" + std::to_string(s.block_bytes);
    }
    case codec::SchemeKind::kShamir:
      return name + ":" + std::to_string(s.threshold) + ":" + std::to_string(s.share_count) + ":" +
             std::to_string(s.modulus) + ":" + std::to_string(s.block_bytes);
  }
  return name;
}

std::string manifest_text(const Manifest& m, ByteView conv_secret) {
  std::ostringstream body;
  body << "snet-manifest " << kManifestVersion << "\n";
  body << "conv=" << m.conv_token << "\n";
  body << "members=";
  for (std::size_t i = 0; i < m.members.size(); ++i) body << (i ? "," : "") << m.members[i];
  body << "\n";
  body << "scheme=" << m.scheme << "\n";
  body << "created_ms=" << m.created_ms << "\n";
  const auto text = body.str();
  const auto tag = crypto::hmac_sha256(conv_secret, to_bytes(text));
  return text + "tag=" + hex_encode(tag) + "\n";
}

Manifest parse_manifest(std::string_view text, ByteView conv_secret) {
  const auto tag_at = text.rfind("tag=");
  const std::string header = "snet-manifest " + std::to_string(kManifestVersion) + "\n";
  if (text.substr(0, header.size()) != header || tag_at == std::string_view::npos ||
      (tag_at > 0 && text[tag_at - 1] != '\n')) {
    fail(ErrorCode::kCorruptState, "not a conversation manifest");
  }
  const auto body = text.substr(0, tag_at);
  auto tag_hex = text.substr(tag_at + 4);
  if (!tag_hex.empty() && tag_hex.back() == '\n') tag_hex.remove_suffix(1);
  const auto expect = hex_encode(crypto::hmac_sha256(conv_secret, to_bytes(body)));
  if (tag_hex != expect) fail(ErrorCode::kCodeMismatch, "manifest does not belong to this invitation");

  Manifest m;
  for (const auto& line : split(body.substr(header.size()), '\n')) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kCorruptState, "manifest line without '='");
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    if (key == "conv") {
      m.conv_token = value;
    } else if (key == "members") {
      if (!value.empty()) m.members = split(value, ',');
    } else if (key == "scheme") {
      m.scheme = value;
    } else if (key == "created_ms") {
      try {
        m.created_ms = static_cast<std::int64_t>(number(value, "created_ms"));
      } catch (const Error&) {
        fail(ErrorCode::kCorruptState, "bad manifest timestamp");
      }
    }
  }
  return m;
}

}  // namespace snet::conv
