#pragma once

#include <cstdint>
#include <filesystem>

#include "snet/bytes.hpp"

namespace snet::covert {

// Uncompressed 24-bit RGB raster, rows top to bottom, pixels left to right,
// channels R, G, B.
struct CoverImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  Bytes rgb;  // 3 * width * height

  std::uint64_t capacity_bits() const { return 3ULL * width * height; }
  bool operator==(const CoverImage&) const = default;
};

inline constexpr std::uint64_t kLengthPrefixBits = 64;

// Writes a 64-bit big-endian length followed by the payload bits, MSB first,
// into the least-significant bit of each channel byte in storage order.
CoverImage embed_share(ByteView payload, const CoverImage& cover);
Bytes extract_share(const CoverImage& stego);

// Standard BMP: 54-byte header, BI_RGB, bottom-up rows padded to 4 bytes.
Bytes encode_bmp(const CoverImage& image);
CoverImage decode_bmp(ByteView file);
void write_bmp(const std::filesystem::path& path, const CoverImage& image);
CoverImage read_bmp(const std::filesystem::path& path);

// Smooth landscape-like test cover: gradients and soft shapes plus mild
// sensor noise. Deterministic in `seed`.
CoverImage synthetic_natural_cover(std::uint32_t width, std::uint32_t height, std::uint64_t seed);

}  // namespace snet::covert
