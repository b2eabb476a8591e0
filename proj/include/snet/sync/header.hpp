#pragma once

#include <cstdint>
#include <string>

#include "snet/bytes.hpp"

namespace snet::sync {

inline constexpr std::size_t kHeaderBytes = 24;
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint32_t kFlagMedia = 1;

// Big-endian on the wire: format_version u32, content_version u64,
// payload_len u64 (plaintext bytes), flags u32. Bits 8..31 of flags carry the
// rewrite generation.
struct ShareFileHeader {
  std::uint32_t format_version = kFormatVersion;
  std::uint64_t content_version = 0;
  std::uint64_t payload_len = 0;
  std::uint32_t flags = 0;

  bool media() const { return flags & kFlagMedia; }
  std::uint32_t generation() const { return flags >> 8; }
  static std::uint32_t make_flags(bool media, std::uint32_t generation) {
    return (generation << 8) | (media ? kFlagMedia : 0);
  }
  bool operator==(const ShareFileHeader&) const = default;
};

Bytes encode_header(const ShareFileHeader& h);
ShareFileHeader decode_header(ByteView raw);

// Pad = PRF(conv_secret, slot || relative path) truncated to 24 bytes. The
// slot keeps the k copies of one file's header from being byte-identical.
Bytes header_pad(ByteView conv_secret, unsigned slot, const std::string& rel_path);
Bytes mask_header(const ShareFileHeader& h, ByteView conv_secret, unsigned slot, const std::string& rel_path);
// Throws kCorruptState when the unmasked format version is not ours.
ShareFileHeader unmask_header(ByteView masked, ByteView conv_secret, unsigned slot, const std::string& rel_path);

}  // namespace snet::sync
