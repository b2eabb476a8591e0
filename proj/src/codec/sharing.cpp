#include "snet/codec/sharing.hpp"

#include <algorithm>
#include <set>

#include "snet/codec/field.hpp"
#include "snet/error.hpp"
#include "snet/random.hpp"

namespace snet::codec {

namespace {

void require_byte_encoding(const SchemeConfig& cfg) {
  if (cfg.kind == SchemeKind::kXor) fail(ErrorCode::kInvalidConfig, "XOR shares bytes directly");
  if (cfg.block_bytes == 0) fail(ErrorCode::kInvalidConfig, "element-only scheme has no byte encoding");
}

void xor_into(std::span<std::uint8_t> acc, ByteView other) {
  const std::size_t n = acc.size();
  for (std::size_t i = 0; i < n; ++i) acc[i] ^= other[i];
}

// Shared payload checks for ADDITIVE/SHAMIR inputs.
void check_payload_lengths(const ShareSet& ss, std::size_t expected) {
  for (const auto& s : ss.shares) {
    if (s.payload.size() != expected) {
      fail(ErrorCode::kLengthMismatch, "share " + std::to_string(s.index) + " has " +
                                           std::to_string(s.payload.size()) + " bytes, expected " +
                                           std::to_string(expected));
    }
  }
}

void check_unique_indices(const ShareSet& ss) {
  std::set<unsigned> seen;
  for (const auto& s : ss.shares) {
    if (!seen.insert(s.index).second) {
      fail(ErrorCode::kDuplicateIndex, "share index " + std::to_string(s.index) + " repeated");
    }
  }
}

}  // namespace

Elements block_encode(ByteView m, const SchemeConfig& cfg) {
  require_byte_encoding(cfg);
  const std::size_t bb = cfg.block_bytes;
  Elements out;
  out.reserve((m.size() + bb - 1) / bb);
  for (std::size_t off = 0; off < m.size(); off += bb) {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < bb; ++j) {
      v = (v << 8) | (off + j < m.size() ? m[off + j] : 0);
    }
    out.push_back(v);
  }
  return out;
}

Bytes block_decode(std::span<const std::uint64_t> elements, const SchemeConfig& cfg,
                   std::size_t plaintext_len) {
  require_byte_encoding(cfg);
  const std::size_t bb = cfg.block_bytes;
  if (elements.size() * bb < plaintext_len) {
    fail(ErrorCode::kLengthMismatch, "too few elements for plaintext length");
  }
  Bytes out;
  out.reserve(elements.size() * bb);
  for (auto v : elements) {
    for (std::size_t j = bb; j-- > 0;) out.push_back(static_cast<std::uint8_t>(v >> (8 * j)));
  }
  out.resize(plaintext_len);
  return out;
}

Bytes encode_elements(std::span<const std::uint64_t> elements, std::size_t width) {
  Bytes out;
  out.reserve(elements.size() * width);
  for (auto v : elements) put_be(out, v, width);
  return out;
}

Elements decode_elements(ByteView payload, std::size_t width) {
  if (payload.size() % width != 0) fail(ErrorCode::kLengthMismatch, "payload not a whole number of elements");
  Elements out;
  out.reserve(payload.size() / width);
  for (std::size_t off = 0; off < payload.size(); off += width) {
    out.push_back(get_be(payload.subspan(off, width), width));
  }
  return out;
}

// ---------------------------------------------------------------------------
// XOR

ShareSet xor_split(ByteView m, unsigned k, RandomSource& rnd) {
  ShareSet ss{SchemeConfig::xor_scheme(k), {}, m.size()};
  ss.shares.reserve(k);
  Bytes last(m.begin(), m.end());
  for (unsigned i = 1; i < k; ++i) {
    Share s{i, Bytes(m.size())};
    rnd.fill(s.payload);
    xor_into(last, s.payload);
    ss.shares.push_back(std::move(s));
  }
  ss.shares.push_back(Share{k, std::move(last)});
  return ss;
}

Bytes xor_reconstruct(const ShareSet& ss) {
  const unsigned k = ss.scheme.share_count;
  check_unique_indices(ss);
  for (unsigned i = 1; i <= k; ++i) {
    if (ss.find(i) == nullptr) fail(ErrorCode::kMissingShare, "XOR share " + std::to_string(i) + " absent");
  }
  if (ss.shares.size() != k) fail(ErrorCode::kInvalidArgument, "share index outside 1..k");
  const std::size_t len = ss.shares.front().payload.size();
  for (const auto& s : ss.shares) {
    if (s.payload.size() != len) fail(ErrorCode::kLengthMismatch, "XOR shares differ in length");
  }
  if (len != ss.plaintext_len) fail(ErrorCode::kLengthMismatch, "XOR share length != plaintext length");
  Bytes out(len, 0);
  for (const auto& s : ss.shares) xor_into(out, s.payload);
  return out;
}

// ---------------------------------------------------------------------------
// ADDITIVE

std::vector<Elements> additive_split_elements(std::span<const std::uint64_t> secrets,
                                              const SchemeConfig& cfg, RandomSource& rnd) {
  const unsigned k = cfg.share_count;
  const std::uint64_t n_mod = cfg.modulus;
  std::vector<Elements> shares(k, Elements(secrets.size()));
  for (std::size_t e = 0; e < secrets.size(); ++e) {
    std::uint64_t remaining = secrets[e] % n_mod;
    for (unsigned i = 0; i + 1 < k; ++i) {
      const std::uint64_t r = rnd.uniform(n_mod);
      shares[i][e] = r;
      remaining = sub_mod(remaining, r, n_mod);
    }
    shares[k - 1][e] = remaining;
  }
  return shares;
}

Elements additive_combine_elements(std::span<const Elements> shares, std::uint64_t n_modulus) {
  if (shares.empty()) return {};
  Elements out(shares.front().size(), 0);
  for (const auto& s : shares) {
    if (s.size() != out.size()) fail(ErrorCode::kLengthMismatch, "additive shares differ in length");
    for (std::size_t e = 0; e < out.size(); ++e) out[e] = add_mod(out[e], s[e] % n_modulus, n_modulus);
  }
  return out;
}

ShareSet additive_split(ByteView m, const SchemeConfig& cfg, RandomSource& rnd) {
  if (cfg.kind != SchemeKind::kAdditive) fail(ErrorCode::kInvalidConfig, "not an additive scheme");
  cfg.validate();
  const auto secrets = block_encode(m, cfg);
  auto parts = additive_split_elements(secrets, cfg, rnd);
  ShareSet ss{cfg, {}, m.size()};
  ss.shares.reserve(parts.size());
  for (unsigned i = 0; i < parts.size(); ++i) {
    ss.shares.push_back(Share{i + 1, encode_elements(parts[i], cfg.element_width())});
  }
  return ss;
}

Bytes additive_reconstruct(const ShareSet& ss, const SchemeConfig& cfg) {
  if (cfg.kind != SchemeKind::kAdditive) fail(ErrorCode::kInvalidConfig, "not an additive scheme");
  const unsigned k = cfg.share_count;
  check_unique_indices(ss);
  for (unsigned i = 1; i <= k; ++i) {
    if (ss.find(i) == nullptr) fail(ErrorCode::kMissingShare, "additive share " + std::to_string(i) + " absent");
  }
  if (ss.shares.size() != k) fail(ErrorCode::kInvalidArgument, "share index outside 1..k");
  check_payload_lengths(ss, cfg.encoded_length(ss.plaintext_len));
  std::vector<Elements> parts;
  parts.reserve(k);
  for (const auto& s : ss.shares) parts.push_back(decode_elements(s.payload, cfg.element_width()));
  return block_decode(additive_combine_elements(parts, cfg.modulus), cfg, ss.plaintext_len);
}

// ---------------------------------------------------------------------------
// SHAMIR

std::vector<Elements> shamir_split_elements(std::span<const std::uint64_t> secrets,
                                            const SchemeConfig& cfg, RandomSource& rnd) {
  if (cfg.kind != SchemeKind::kShamir) fail(ErrorCode::kInvalidConfig, "not a Shamir scheme");
  const unsigned t = cfg.threshold;
  const unsigned n = cfg.share_count;
  const std::uint64_t p = cfg.modulus;
  std::vector<Elements> shares(n, Elements(secrets.size()));
  std::vector<std::uint64_t> coeffs(t);
  for (std::size_t e = 0; e < secrets.size(); ++e) {
    coeffs[0] = secrets[e] % p;
    for (unsigned j = 1; j < t; ++j) coeffs[j] = rnd.uniform(p);
    for (unsigned x = 1; x <= n; ++x) {
      // Horner evaluation of f(x).
      std::uint64_t acc = 0;
      for (unsigned j = t; j-- > 0;) acc = add_mod(mul_mod(acc, x, p), coeffs[j], p);
      shares[x - 1][e] = acc;
    }
  }
  return shares;
}

std::vector<std::uint64_t> lagrange_weights_at_zero(std::span<const unsigned> indices,
                                                    std::uint64_t p) {
  std::vector<std::uint64_t> weights(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const std::uint64_t xj = indices[j] % p;
    std::uint64_t num = 1;
    std::uint64_t den = 1;
    for (std::size_t m = 0; m < indices.size(); ++m) {
      if (m == j) continue;
      const std::uint64_t xm = indices[m] % p;
      if (xm == xj) fail(ErrorCode::kDuplicateIndex, "interpolation points coincide mod p");
      num = mul_mod(num, xm, p);
      den = mul_mod(den, sub_mod(xm, xj, p), p);
    }
    weights[j] = mul_mod(num, inv_mod_prime(den, p), p);
  }
  return weights;
}

Elements shamir_interpolate_elements(std::span<const unsigned> indices,
                                     std::span<const Elements> shares, std::uint64_t p) {
  if (indices.size() != shares.size()) fail(ErrorCode::kInvalidArgument, "index/share count mismatch");
  if (shares.empty()) return {};
  const auto weights = lagrange_weights_at_zero(indices, p);
  Elements out(shares.front().size(), 0);
  for (std::size_t j = 0; j < shares.size(); ++j) {
    if (shares[j].size() != out.size()) fail(ErrorCode::kLengthMismatch, "Shamir shares differ in length");
    for (std::size_t e = 0; e < out.size(); ++e) {
      out[e] = add_mod(out[e], mul_mod(weights[j], shares[j][e] % p, p), p);
    }
  }
  return out;
}

ShareSet shamir_split(ByteView m, const SchemeConfig& cfg, RandomSource& rnd) {
  if (cfg.kind != SchemeKind::kShamir) fail(ErrorCode::kInvalidConfig, "not a Shamir scheme");
  cfg.validate();
  require_byte_encoding(cfg);
  const auto secrets = block_encode(m, cfg);
  auto parts = shamir_split_elements(secrets, cfg, rnd);
  ShareSet ss{cfg, {}, m.size()};
  ss.shares.reserve(parts.size());
  for (unsigned i = 0; i < parts.size(); ++i) {
    ss.shares.push_back(Share{i + 1, encode_elements(parts[i], cfg.element_width())});
  }
  return ss;
}

Bytes shamir_reconstruct(const ShareSet& ss, const SchemeConfig& cfg) {
  if (cfg.kind != SchemeKind::kShamir) fail(ErrorCode::kInvalidConfig, "not a Shamir scheme");
  require_byte_encoding(cfg);
  check_unique_indices(ss);
  const unsigned t = cfg.threshold;
  if (ss.shares.size() < t) {
    fail(ErrorCode::kInsufficientShares, std::to_string(ss.shares.size()) + " shares given, threshold is " +
                                             std::to_string(t));
  }
  std::vector<unsigned> indices;
  std::vector<Elements> parts;
  for (unsigned j = 0; j < t; ++j) {
    const auto& s = ss.shares[j];
    if (s.index == 0 || s.index >= cfg.modulus) fail(ErrorCode::kInvalidArgument, "share index out of range");
    if (s.payload.size() != cfg.encoded_length(ss.plaintext_len)) {
      fail(ErrorCode::kLengthMismatch, "Shamir share " + std::to_string(s.index) + " has wrong length");
    }
    indices.push_back(s.index);
    parts.push_back(decode_elements(s.payload, cfg.element_width()));
  }
  return block_decode(shamir_interpolate_elements(indices, parts, cfg.modulus), cfg, ss.plaintext_len);
}

// ---------------------------------------------------------------------------

ShareSet split(ByteView m, const SchemeConfig& cfg, RandomSource& rnd) {
  switch (cfg.kind) {
    case SchemeKind::kXor: return xor_split(m, cfg.share_count, rnd);
    case SchemeKind::kAdditive: return additive_split(m, cfg, rnd);
    case SchemeKind::kShamir: return shamir_split(m, cfg, rnd);
  }
  fail(ErrorCode::kInvalidConfig, "unknown scheme kind");
}

Bytes reconstruct(const ShareSet& ss) {
  switch (ss.scheme.kind) {
    case SchemeKind::kXor: return xor_reconstruct(ss);
    case SchemeKind::kAdditive: return additive_reconstruct(ss, ss.scheme);
    case SchemeKind::kShamir: return shamir_reconstruct(ss, ss.scheme);
  }
  fail(ErrorCode::kInvalidConfig, "unknown scheme kind");
}

}  // namespace snet::codec
