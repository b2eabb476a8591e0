#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "snet/bytes.hpp"
#include "snet/codec/scheme.hpp"

namespace snet {
class RandomSource;
}

namespace snet::codec {

using Elements = std::vector<std::uint64_t>;

// Splits m into ceil(|m| / block_bytes) big-endian blocks; the last partial
// block is zero-padded on the right. ADDITIVE and SHAMIR only.
Elements block_encode(ByteView m, const SchemeConfig& cfg);
// Inverse of block_encode, truncated to plaintext_len. Elements wider than a
// block keep only their low block_bytes bytes.
Bytes block_decode(std::span<const std::uint64_t> elements, const SchemeConfig& cfg,
                   std::size_t plaintext_len);

// Fixed-width big-endian element serialization used for share payloads.
Bytes encode_elements(std::span<const std::uint64_t> elements, std::size_t width);
Elements decode_elements(ByteView payload, std::size_t width);

ShareSet xor_split(ByteView m, unsigned k, RandomSource& rnd);
Bytes xor_reconstruct(const ShareSet& ss);

// Element-level additive sharing over Z_N: returns k element vectors.
std::vector<Elements> additive_split_elements(std::span<const std::uint64_t> secrets,
                                              const SchemeConfig& cfg, RandomSource& rnd);
Elements additive_combine_elements(std::span<const Elements> shares, std::uint64_t n_modulus);

ShareSet additive_split(ByteView m, const SchemeConfig& cfg, RandomSource& rnd);
// Reconstructs under cfg.modulus, which need not match the split's N: a wrong
// modulus is not detectable and yields garbage.
Bytes additive_reconstruct(const ShareSet& ss, const SchemeConfig& cfg);

// Element-level Shamir sharing over F_p: returns n element vectors where
// vector i-1 holds f(i) per secret.
std::vector<Elements> shamir_split_elements(std::span<const std::uint64_t> secrets,
                                            const SchemeConfig& cfg, RandomSource& rnd);
// Lagrange interpolation at x = 0 over the given (index, elements) pairs.
Elements shamir_interpolate_elements(std::span<const unsigned> indices,
                                     std::span<const Elements> shares, std::uint64_t p);
// Lagrange basis weights at x = 0 for the given distinct nonzero indices.
std::vector<std::uint64_t> lagrange_weights_at_zero(std::span<const unsigned> indices,
                                                    std::uint64_t p);

ShareSet shamir_split(ByteView m, const SchemeConfig& cfg, RandomSource& rnd);
// Needs >= t distinct indices in ss.shares; uses the first t of them.
Bytes shamir_reconstruct(const ShareSet& ss, const SchemeConfig& cfg);

// Dispatch on cfg.kind.
ShareSet split(ByteView m, const SchemeConfig& cfg, RandomSource& rnd);
Bytes reconstruct(const ShareSet& ss);

}  // namespace snet::codec
