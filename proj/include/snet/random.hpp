#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <span>

#include "snet/bytes.hpp"

namespace snet {

// Injectable source of share randomness. Every split operation takes one by
// reference; none of the library reaches for a global generator.
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  virtual void fill(std::span<std::uint8_t> out) = 0;

  // Uniform draw from [0, bound), bound >= 1. The default rejection-samples
  // 64-bit words taken from fill().
  virtual std::uint64_t uniform(std::uint64_t bound);

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
  }
};

// Production generator backed by the OpenSSL DRBG.
class SecureRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// Deterministic generator for tests and benchmarks; identical seeds give
// identical streams.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mt19937_64 engine_;
  std::uint64_t buffer_ = 0;
  int buffered_ = 0;
};

// Replays caller-supplied bytes and field elements verbatim. Throws
// kInvalidArgument when a script runs dry or an element is out of range.
class ScriptedRandom final : public RandomSource {
 public:
  ScriptedRandom() = default;
  explicit ScriptedRandom(ByteView bytes) : bytes_(bytes.begin(), bytes.end()) {}

  void push_bytes(ByteView b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }
  void push_elements(std::initializer_list<std::uint64_t> e) {
    elements_.insert(elements_.end(), e.begin(), e.end());
  }
  void push_element(std::uint64_t e) { elements_.push_back(e); }

  void fill(std::span<std::uint8_t> out) override;
  std::uint64_t uniform(std::uint64_t bound) override;

  std::size_t bytes_left() const { return bytes_.size(); }
  std::size_t elements_left() const { return elements_.size(); }

 private:
  std::deque<std::uint8_t> bytes_;
  std::deque<std::uint64_t> elements_;
};

}  // namespace snet
