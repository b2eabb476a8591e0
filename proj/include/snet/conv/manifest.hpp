#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "snet/bytes.hpp"
#include "snet/codec/scheme.hpp"
#include "snet/random.hpp"

namespace snet::conv {

// Human-writable scheme specs:
//   xor:<k>
//   additive:<k>:<N>:<block>     additive:<k>:unknown  (N drawn in [2^24, 2^25))
//   shamir:<t>:<n>               shamir:<t>:<n>:<p>:<block>
codec::SchemeConfig parse_scheme_spec(std::string_view spec, RandomSource& rnd);
// Canonical spec; a secret modulus is written as '?' unless `with_secret`.
std::string scheme_spec(const codec::SchemeConfig& s, bool with_secret);

struct Manifest {
  std::string conv_token;
  std::vector<std::string> members;  // sorted member tokens
  std::string scheme;                // scheme_spec without secrets
  std::int64_t created_ms = 0;

  bool operator==(const Manifest&) const = default;
};

inline constexpr int kManifestVersion = 1;

// UTF-8 key=value lines closed by an HMAC tag keyed with the conversation
// secret, so a joiner can tell that code and manifest belong together.
std::string manifest_text(const Manifest& m, ByteView conv_secret);
// kCodeMismatch when the tag does not verify under `conv_secret`;
// kCorruptState when the text is not a manifest at all.
Manifest parse_manifest(std::string_view text, ByteView conv_secret);

}  // namespace snet::conv
