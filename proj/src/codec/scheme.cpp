#include "snet/codec/scheme.hpp"

#include "snet/codec/field.hpp"
#include "snet/error.hpp"
#include "snet/random.hpp"

namespace snet::codec {

namespace {
constexpr unsigned kMaxShares = 255;
constexpr unsigned kMaxBlockBytes = 7;

unsigned __int128 block_space(unsigned block_bytes) {
  return static_cast<unsigned __int128>(1) << (8 * block_bytes);
}
}  // namespace

std::string_view scheme_kind_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kXor: return "xor";
    case SchemeKind::kAdditive: return "additive";
    case SchemeKind::kShamir: return "shamir";
  }
  return "unknown";
}

SchemeKind parse_scheme_kind(std::string_view name) {
  if (name == "xor" || name == "XOR") return SchemeKind::kXor;
  if (name == "additive" || name == "ADDITIVE") return SchemeKind::kAdditive;
  if (name == "shamir" || name == "SHAMIR") return SchemeKind::kShamir;
  fail(ErrorCode::kInvalidConfig, "unknown scheme '" + std::string(name) + "'");
}

SchemeConfig SchemeConfig::xor_scheme(unsigned k) {
  SchemeConfig cfg;
  cfg.kind = SchemeKind::kXor;
  cfg.share_count = k;
  cfg.threshold = k;
  cfg.modulus = 256;
  cfg.block_bytes = 1;
  cfg.validate();
  return cfg;
}

SchemeConfig SchemeConfig::additive(unsigned k, std::uint64_t n_modulus, unsigned block_bytes) {
  SchemeConfig cfg;
  cfg.kind = SchemeKind::kAdditive;
  cfg.share_count = k;
  cfg.threshold = k;
  cfg.modulus = n_modulus;
  cfg.block_bytes = block_bytes;
  cfg.validate();
  return cfg;
}

SchemeConfig SchemeConfig::additive_unknown_modulus(unsigned k, RandomSource& rnd) {
  auto n_modulus = kUnknownModulusLo + rnd.uniform(kUnknownModulusHi - kUnknownModulusLo);
  auto cfg = additive(k, n_modulus, 3);
  cfg.modulus_secret = true;
  return cfg;
}

SchemeConfig SchemeConfig::shamir(unsigned t, unsigned n, std::uint64_t p, unsigned block_bytes) {
  SchemeConfig cfg;
  cfg.kind = SchemeKind::kShamir;
  cfg.share_count = n;
  cfg.threshold = t;
  cfg.modulus = p;
  cfg.block_bytes = block_bytes;
  cfg.validate();
  return cfg;
}

std::size_t byte_width(std::uint64_t max_value) {
  std::size_t w = 1;
  while (w < 8 && (max_value >> (8 * w)) != 0) ++w;
  return w;
}

std::size_t SchemeConfig::element_width() const {
  return kind == SchemeKind::kXor ? 1 : byte_width(modulus - 1);
}

std::size_t SchemeConfig::encoded_length(std::size_t plaintext_len) const {
  if (kind == SchemeKind::kXor) return plaintext_len;
  if (block_bytes == 0) fail(ErrorCode::kInvalidConfig, "element-only scheme has no byte encoding");
  return (plaintext_len + block_bytes - 1) / block_bytes * element_width();
}

void SchemeConfig::validate() const {
  switch (kind) {
    case SchemeKind::kXor:
      if (share_count < 2 || share_count > kMaxShares) fail(ErrorCode::kInvalidConfig, "XOR needs 2 <= k <= 255");
      return;
    case SchemeKind::kAdditive:
      if (share_count < 2 || share_count > kMaxShares) {
        fail(ErrorCode::kInvalidConfig, "additive needs 2 <= k <= 255");
      }
      if (block_bytes < 1 || block_bytes > kMaxBlockBytes) {
        fail(ErrorCode::kInvalidConfig, "block_bytes must be in [1, 7]");
      }
      if (modulus < 2) fail(ErrorCode::kInvalidConfig, "N must be >= 2");
      if (block_space(block_bytes) > modulus) {
        fail(ErrorCode::kInvalidConfig, "256^block_bytes exceeds N");
      }
      return;
    case SchemeKind::kShamir:
      if (share_count < 1 || share_count > kMaxShares) fail(ErrorCode::kInvalidConfig, "Shamir needs 1 <= n <= 255");
      if (threshold < 1 || threshold > share_count) fail(ErrorCode::kInvalidConfig, "Shamir needs 1 <= t <= n");
      if (block_bytes > kMaxBlockBytes) fail(ErrorCode::kInvalidConfig, "block_bytes must be <= 7");
      if (!is_prime(modulus)) fail(ErrorCode::kInvalidConfig, "p is not prime");
      if (share_count >= modulus) fail(ErrorCode::kInvalidConfig, "n must be < p");
      // block_bytes == 0 marks an element-only configuration (no byte encoding).
      if (block_bytes > 0 && block_space(block_bytes) >= modulus) {
        fail(ErrorCode::kInvalidConfig, "256^block_bytes must be < p");
      }
      return;
  }
  fail(ErrorCode::kInvalidConfig, "unknown scheme kind");
}

const Share* ShareSet::find(unsigned index) const {
  for (const auto& s : shares) {
    if (s.index == index) return &s;
  }
  return nullptr;
}

}  // namespace snet::codec
