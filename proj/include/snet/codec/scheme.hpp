#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "snet/bytes.hpp"

namespace snet {
class RandomSource;
}

namespace snet::codec {

enum class SchemeKind : std::uint8_t { kXor = 1, kAdditive = 2, kShamir = 3 };

std::string_view scheme_kind_name(SchemeKind kind);
SchemeKind parse_scheme_kind(std::string_view name);

inline constexpr std::uint64_t kMersenne61 = (1ULL << 61) - 1;
inline constexpr std::uint64_t kUnknownModulusLo = 1ULL << 24;
inline constexpr std::uint64_t kUnknownModulusHi = 1ULL << 25;

// Which sharing scheme a conversation uses and with what parameters.
//   XOR:      share_count = k.
//   ADDITIVE: share_count = k, modulus = N, block_bytes; 256^block_bytes <= N.
//   SHAMIR:   share_count = n, threshold = t, modulus = p (prime),
//             block_bytes; 256^block_bytes < p and n < p.
struct SchemeConfig {
  SchemeKind kind = SchemeKind::kXor;
  unsigned share_count = 2;
  unsigned threshold = 2;
  std::uint64_t modulus = 256;
  unsigned block_bytes = 1;
  // Set when N was drawn at random and may only travel in invitation codes.
  bool modulus_secret = false;

  static SchemeConfig xor_scheme(unsigned k);
  static SchemeConfig additive(unsigned k, std::uint64_t n_modulus, unsigned block_bytes);
  // N uniform in [2^24, 2^25), 3-byte blocks.
  static SchemeConfig additive_unknown_modulus(unsigned k, RandomSource& rnd);
  static SchemeConfig shamir(unsigned t, unsigned n, std::uint64_t p = kMersenne61,
                             unsigned block_bytes = 7);

  // Total shares produced by a split.
  unsigned shares() const { return share_count; }
  // Shares needed to reconstruct: k for XOR/ADDITIVE, t for SHAMIR.
  unsigned required() const { return kind == SchemeKind::kShamir ? threshold : share_count; }

  // Encoded bytes per element; 1 for XOR (bytes are their own elements).
  std::size_t element_width() const;
  // Plaintext bytes per element; 1 for XOR.
  std::size_t plain_block() const { return kind == SchemeKind::kXor ? 1 : block_bytes; }
  // Share payload length for a plaintext of `plaintext_len` bytes.
  std::size_t encoded_length(std::size_t plaintext_len) const;
  // Number of complete plaintext blocks in `plaintext_len` bytes.
  std::size_t full_blocks(std::size_t plaintext_len) const { return plaintext_len / plain_block(); }

  // Throws kInvalidConfig when an invariant above is violated.
  void validate() const;

  bool operator==(const SchemeConfig&) const = default;
};

// Smallest byte count that holds `max_value`.
std::size_t byte_width(std::uint64_t max_value);

struct Share {
  unsigned index = 0;  // 1-based
  Bytes payload;
  bool operator==(const Share&) const = default;
};

struct ShareSet {
  SchemeConfig scheme;
  std::vector<Share> shares;
  std::size_t plaintext_len = 0;

  const Share* find(unsigned index) const;
  bool operator==(const ShareSet&) const = default;
};

}  // namespace snet::codec
