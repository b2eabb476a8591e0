#include "snet/covert/stego.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "snet/error.hpp"

namespace snet::covert {

namespace {

constexpr std::size_t kBmpHeaderBytes = 54;

void put_le(Bytes& out, std::uint64_t v, int width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(ByteView in, std::size_t off, int width) {
  std::uint64_t v = 0;
  for (int i = width; i-- > 0;) v = (v << 8) | in[off + i];
  return v;
}

std::size_t row_stride(std::uint32_t width) { return (3 * static_cast<std::size_t>(width) + 3) & ~std::size_t{3}; }

void check_shape(const CoverImage& img) {
  if (img.rgb.size() != 3ULL * img.width * img.height) {
    fail(ErrorCode::kMalformedImage, "pixel buffer does not match dimensions");
  }
}

}  // namespace

CoverImage embed_share(ByteView payload, const CoverImage& cover) {
  check_shape(cover);
  const std::uint64_t needed = kLengthPrefixBits + 8ULL * payload.size();
  if (needed > cover.capacity_bits()) {
    fail(ErrorCode::kInsufficientCapacity, "need " + std::to_string(needed) + " bits, cover holds " +
                                               std::to_string(cover.capacity_bits()));
  }
  CoverImage out = cover;
  std::size_t pos = 0;
  auto put_bit = [&](unsigned bit) {
    out.rgb[pos] = static_cast<std::uint8_t>((out.rgb[pos] & 0xFE) | bit);
    ++pos;
  };
  const std::uint64_t len = payload.size();
  for (int i = 63; i >= 0; --i) put_bit(static_cast<unsigned>(len >> i) & 1);
  for (auto b : payload) {
    for (int i = 7; i >= 0; --i) put_bit((b >> i) & 1);
  }
  return out;
}

Bytes extract_share(const CoverImage& stego) {
  check_shape(stego);
  if (stego.capacity_bits() < kLengthPrefixBits) fail(ErrorCode::kMalformedLength, "image too small for a length prefix");
  std::uint64_t len = 0;
  for (std::size_t i = 0; i < kLengthPrefixBits; ++i) len = (len << 1) | (stego.rgb[i] & 1);
  if (len > (stego.capacity_bits() - kLengthPrefixBits) / 8) {
    fail(ErrorCode::kMalformedLength, "declared length " + std::to_string(len) + " exceeds capacity");
  }
  Bytes out(len, 0);
  std::size_t pos = kLengthPrefixBits;
  for (auto& b : out) {
    for (int i = 0; i < 8; ++i) b = static_cast<std::uint8_t>((b << 1) | (stego.rgb[pos++] & 1));
  }
  return out;
}

Bytes encode_bmp(const CoverImage& image) {
  check_shape(image);
  const std::size_t stride = row_stride(image.width);
  const std::size_t pixel_bytes = stride * image.height;
  Bytes out;
  out.reserve(kBmpHeaderBytes + pixel_bytes);
  // BITMAPFILEHEADER
  out.push_back('B');
  out.push_back('M');
  put_le(out, kBmpHeaderBytes + pixel_bytes, 4);
  put_le(out, 0, 4);
  put_le(out, kBmpHeaderBytes, 4);
  // BITMAPINFOHEADER
  put_le(out, 40, 4);
  put_le(out, image.width, 4);
  put_le(out, image.height, 4);
  put_le(out, 1, 2);
  put_le(out, 24, 2);
  put_le(out, 0, 4);  // BI_RGB
  put_le(out, pixel_bytes, 4);
  put_le(out, 2835, 4);  // 72 dpi
  put_le(out, 2835, 4);
  put_le(out, 0, 4);
  put_le(out, 0, 4);
  for (std::uint32_t row = image.height; row-- > 0;) {
    const std::size_t base = 3ULL * image.width * row;
    for (std::uint32_t x = 0; x < image.width; ++x) {
      const std::size_t p = base + 3ULL * x;
      out.push_back(image.rgb[p + 2]);
      out.push_back(image.rgb[p + 1]);
      out.push_back(image.rgb[p]);
    }
    for (std::size_t pad = 3ULL * image.width; pad < stride; ++pad) out.push_back(0);
  }
  return out;
}

CoverImage decode_bmp(ByteView file) {
  if (file.size() < kBmpHeaderBytes || file[0] != 'B' || file[1] != 'M') {
    fail(ErrorCode::kMalformedImage, "not a BMP file");
  }
  const auto offset = get_le(file, 10, 4);
  const auto header_size = get_le(file, 14, 4);
  const auto width = static_cast<std::int32_t>(get_le(file, 18, 4));
  const auto raw_height = static_cast<std::int32_t>(get_le(file, 22, 4));
  const auto bpp = get_le(file, 28, 2);
  const auto compression = get_le(file, 30, 4);
  if (header_size < 40 || bpp != 24 || compression != 0 || width <= 0 || raw_height == 0) {
    fail(ErrorCode::kMalformedImage, "only uncompressed 24-bit BMP is supported");
  }
  const bool bottom_up = raw_height > 0;
  const auto height = static_cast<std::uint32_t>(bottom_up ? raw_height : -raw_height);
  CoverImage img;
  img.width = static_cast<std::uint32_t>(width);
  img.height = height;
  const std::size_t stride = row_stride(img.width);
  if (offset + stride * height > file.size()) fail(ErrorCode::kMalformedImage, "truncated pixel data");
  img.rgb.resize(3ULL * img.width * height);
  for (std::uint32_t r = 0; r < height; ++r) {
    const std::size_t src = offset + stride * r;
    const std::uint32_t row = bottom_up ? height - 1 - r : r;
    for (std::uint32_t x = 0; x < img.width; ++x) {
      const std::size_t d = 3ULL * (static_cast<std::size_t>(row) * img.width + x);
      img.rgb[d] = file[src + 3 * x + 2];
      img.rgb[d + 1] = file[src + 3 * x + 1];
      img.rgb[d + 2] = file[src + 3 * x];
    }
  }
  return img;
}

void write_bmp(const std::filesystem::path& path, const CoverImage& image) {
  write_file_atomic(path, encode_bmp(image));
}

CoverImage read_bmp(const std::filesystem::path& path) { return decode_bmp(read_file(path)); }

CoverImage synthetic_natural_cover(std::uint32_t width, std::uint32_t height, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 2.0);
  const double horizon = 0.35 + 0.3 * unif(gen);
  const double sun_x = unif(gen), sun_y = 0.15 + 0.2 * unif(gen);
  const double hue = unif(gen);
  const double hill_phase = 6.28 * unif(gen), hill_freq = 2 + 4 * unif(gen);

  CoverImage img{width, height, Bytes(3ULL * width * height)};
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < width; ++x) {
      const double u = static_cast<double>(x) / width;
      const double v = static_cast<double>(y) / height;
      const double ridge = horizon + 0.08 * std::sin(hill_freq * u * 6.28 + hill_phase);
      double r, g, b;
      if (v < ridge) {
        // Sky gradient with a soft sun glow.
        const double glow = std::exp(-((u - sun_x) * (u - sun_x) + (v - sun_y) * (v - sun_y)) * 40.0);
        r = 90 + 80 * v + 140 * glow;
        g = 140 + 60 * v + 120 * glow;
        b = 200 + 40 * v + 30 * glow * hue;
      } else {
        // Ground: darker with depth and slow texture.
        const double depth = (v - ridge) / (1.0 - ridge + 1e-9);
        const double tex = 12 * std::sin(u * 40 + v * 17) * std::sin(v * 31);
        r = 60 + 50 * hue + 40 * depth + tex;
        g = 110 - 30 * depth + tex;
        b = 50 + 20 * depth + tex * 0.5;
      }
      const std::size_t p = 3ULL * (static_cast<std::size_t>(y) * width + x);
      img.rgb[p] = static_cast<std::uint8_t>(std::clamp(r + noise(gen), 0.0, 255.0));
      img.rgb[p + 1] = static_cast<std::uint8_t>(std::clamp(g + noise(gen), 0.0, 255.0));
      img.rgb[p + 2] = static_cast<std::uint8_t>(std::clamp(b + noise(gen), 0.0, 255.0));
    }
  }
  return img;
}

}  // namespace snet::covert
