#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "snet/bytes.hpp"

namespace snet::crypto {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);
Digest hmac_sha256(ByteView key, ByteView message);

// Keyed PRF expanded to `length` bytes: HMAC(key, message || counter_be32)
// blocks concatenated and truncated.
Bytes prf_expand(ByteView key, ByteView message, std::size_t length);

// AES-128-CTR over `data` with a fresh context per call; key is 16 bytes and
// iv 16 bytes. Used as the per-recipient encryption baseline.
Bytes aes128_ctr(ByteView key, ByteView iv, ByteView data);

// Standard base64 with padding. Decoding throws kInvalidArgument.
std::string base64_encode(ByteView data);
Bytes base64_decode(std::string_view text);

}  // namespace snet::crypto
