#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "snet/bytes.hpp"
#include "snet/codec/scheme.hpp"

namespace snet::conv {

// RFC 4648 base32 without padding. Decoding ignores case, spaces and '-'.
std::string base32_encode(ByteView data);
Bytes base32_decode(std::string_view text);  // kInvalidCode on a bad symbol

// Everything a member needs to join: the only channel that carries the
// header-masking secret and, in unknown-N mode, the modulus.
struct Invitation {
  std::string conv_token;  // 32 hex
  codec::SchemeConfig scheme;
  Bytes conv_secret;  // 32 bytes
  std::vector<std::string> backend_labels;

  bool operator==(const Invitation&) const = default;
};

inline constexpr std::uint8_t kInvitationVersion = 1;

// Versioned binary envelope with a 4-byte SHA-256 check, then base32.
std::string encode_invitation(const Invitation& inv);
// kInvalidCode when the text is not a well-formed, intact envelope.
Invitation decode_invitation(std::string_view code);

}  // namespace snet::conv
