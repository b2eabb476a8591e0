#pragma once

#include <cstdint>

namespace snet::codec {

// Arithmetic in Z_m for any modulus m < 2^64. Operands must already be reduced.

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) + b) % m);
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return a >= b ? a - b : m - (b - a);
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

// Multiplicative inverse modulo a prime (Fermat); a must be nonzero mod p.
std::uint64_t inv_mod_prime(std::uint64_t a, std::uint64_t p);

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

}  // namespace snet::codec
