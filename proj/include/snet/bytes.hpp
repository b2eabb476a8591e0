#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace snet {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

std::string hex_encode(ByteView data);
Bytes hex_decode(std::string_view hex);

// Big-endian fixed-width integer packing.
void put_be(Bytes& out, std::uint64_t value, std::size_t width);
std::uint64_t get_be(ByteView in, std::size_t width);

inline void append(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

// True if `needle` occurs anywhere in `haystack`.
bool contains(ByteView haystack, ByteView needle);

Bytes read_file(const std::filesystem::path& path);
// Write-temp-then-rename; parent directories are created.
void write_file_atomic(const std::filesystem::path& path, ByteView data);

}  // namespace snet
