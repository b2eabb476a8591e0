#include "snet/conv/invitation.hpp"

#include <algorithm>

#include "snet/crypto.hpp"
#include "snet/error.hpp"

namespace snet::conv {
namespace {

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";
constexpr std::size_t kCheckBytes = 4;

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}
  std::uint64_t uint(std::size_t width) {
    need(width);
    auto v = get_be(data_.subspan(pos_, width), width);
    pos_ += width;
    return v;
  }
  Bytes bytes(std::size_t n) {
    need(n);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail(ErrorCode::kInvalidCode, "invitation code is truncated");
  }
  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string base32_encode(ByteView data) {
  std::string out;
  std::uint32_t buffer = 0;
  int bits = 0;
  for (auto b : data) {
    buffer = (buffer << 8) | b;
    bits += 8;
    while (bits >= 5) {
      out.push_back(kAlphabet[(buffer >> (bits - 5)) & 31]);
      bits -= 5;
    }
  }
  if (bits > 0) out.push_back(kAlphabet[(buffer << (5 - bits)) & 31]);
  return out;
}

Bytes base32_decode(std::string_view text) {
  Bytes out;
  std::uint32_t buffer = 0;
  int bits = 0;
  for (char c : text) {
    if (c == ' ' || c == '-' || c == '\n' || c == '\t' || c == '=') continue;
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    const auto at = kAlphabet.find(c);
    if (at == std::string_view::npos) fail(ErrorCode::kInvalidCode, std::string("invalid base32 symbol '") + c + "'");
    buffer = (buffer << 5) | static_cast<std::uint32_t>(at);
    bits += 5;
    if (bits >= 8) {
      out.push_back(static_cast<std::uint8_t>(buffer >> (bits - 8)));
      bits -= 8;
    }
  }
  return out;
}

std::string encode_invitation(const Invitation& inv) {
  const auto token = hex_decode(inv.conv_token);
  if (token.size() != 16) fail(ErrorCode::kInvalidArgument, "conversation token must be 128 bits");
  if (inv.conv_secret.size() != 32) fail(ErrorCode::kInvalidArgument, "conversation secret must be 256 bits");
  if (inv.backend_labels.size() > 255) fail(ErrorCode::kInvalidArgument, "too many backends");
  const auto& s = inv.scheme;
  Bytes body;
  body.push_back(kInvitationVersion);
  append(body, token);
  body.push_back(static_cast<std::uint8_t>(s.kind));
  body.push_back(static_cast<std::uint8_t>(s.share_count));
  body.push_back(static_cast<std::uint8_t>(s.threshold));
  body.push_back(static_cast<std::uint8_t>(s.block_bytes));
  put_be(body, s.modulus, 8);
  body.push_back(s.modulus_secret ? 1 : 0);
  append(body, inv.conv_secret);
  body.push_back(static_cast<std::uint8_t>(inv.backend_labels.size()));
  for (const auto& label : inv.backend_labels) {
    if (label.empty() || label.size() > 255) fail(ErrorCode::kInvalidArgument, "bad backend label '" + label + "'");
    body.push_back(static_cast<std::uint8_t>(label.size()));
    append(body, to_bytes(label));
  }
  const auto check = crypto::sha256(body);
  body.insert(body.end(), check.begin(), check.begin() + kCheckBytes);
  return base32_encode(body);
}

Invitation decode_invitation(std::string_view code) {
  const auto raw = base32_decode(code);
  if (raw.size() < 1 + kCheckBytes) fail(ErrorCode::kInvalidCode, "invitation code is truncated");
  const ByteView body(raw.data(), raw.size() - kCheckBytes);
  const auto check = crypto::sha256(body);
  if (!std::equal(check.begin(), check.begin() + kCheckBytes, raw.end() - kCheckBytes)) {
    fail(ErrorCode::kInvalidCode, "invitation code checksum mismatch");
  }
  Reader r(body);
  if (r.uint(1) != kInvitationVersion) fail(ErrorCode::kInvalidCode, "unsupported invitation version");
  Invitation inv;
  inv.conv_token = hex_encode(r.bytes(16));
  auto& s = inv.scheme;
  const auto kind = r.uint(1);
  if (kind < 1 || kind > 3) fail(ErrorCode::kInvalidCode, "unknown scheme in invitation");
  s.kind = static_cast<codec::SchemeKind>(kind);
  s.share_count = static_cast<unsigned>(r.uint(1));
  s.threshold = static_cast<unsigned>(r.uint(1));
  s.block_bytes = static_cast<unsigned>(r.uint(1));
  s.modulus = r.uint(8);
  s.modulus_secret = r.uint(1) != 0;
  inv.conv_secret = r.bytes(32);
  const auto labels = r.uint(1);
  for (std::uint64_t i = 0; i < labels; ++i) inv.backend_labels.push_back(to_string(r.bytes(r.uint(1))));
  if (!r.done()) fail(ErrorCode::kInvalidCode, "trailing bytes in invitation");
  try {
    s.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kInvalidCode, std::string("invitation scheme invalid: ") + e.what());
  }
  return inv;
}

}  // namespace snet::conv
