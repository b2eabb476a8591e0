#include "snet/random.hpp"

#include <openssl/rand.h>

#include <limits>

#include "snet/error.hpp"

namespace snet {

std::uint64_t RandomSource::uniform(std::uint64_t bound) {
  if (bound == 0) fail(ErrorCode::kInvalidArgument, "uniform bound must be positive");
  if (bound == 1) return 0;
  // Largest multiple of bound that fits; draws above it are rejected.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint8_t raw[8];
    fill(raw);
    std::uint64_t v = get_be(raw, 8);
    if (v < limit) return v % bound;
  }
}

void SecureRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    fail(ErrorCode::kIoFailure, "RAND_bytes failed");
  }
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (buffered_ == 0) {
      buffer_ = engine_();
      buffered_ = 8;
    }
    b = static_cast<std::uint8_t>(buffer_);
    buffer_ >>= 8;
    --buffered_;
  }
}

void ScriptedRandom::fill(std::span<std::uint8_t> out) {
  if (out.size() > bytes_.size()) fail(ErrorCode::kInvalidArgument, "scripted bytes exhausted");
  for (auto& b : out) {
    b = bytes_.front();
    bytes_.pop_front();
  }
}

std::uint64_t ScriptedRandom::uniform(std::uint64_t bound) {
  if (elements_.empty()) fail(ErrorCode::kInvalidArgument, "scripted elements exhausted");
  auto v = elements_.front();
  elements_.pop_front();
  if (v >= bound) fail(ErrorCode::kInvalidArgument, "scripted element out of range");
  return v;
}

}  // namespace snet
