#include "snet/sync/header.hpp"

#include "snet/crypto.hpp"
#include "snet/error.hpp"

namespace snet::sync {

Bytes encode_header(const ShareFileHeader& h) {
  Bytes out;
  out.reserve(kHeaderBytes);
  put_be(out, h.format_version, 4);
  put_be(out, h.content_version, 8);
  put_be(out, h.payload_len, 8);
  put_be(out, h.flags, 4);
  return out;
}

ShareFileHeader decode_header(ByteView raw) {
  if (raw.size() < kHeaderBytes) fail(ErrorCode::kCorruptState, "short share header");
  ShareFileHeader h;
  h.format_version = static_cast<std::uint32_t>(get_be(raw.subspan(0, 4), 4));
  h.content_version = get_be(raw.subspan(4, 8), 8);
  h.payload_len = get_be(raw.subspan(12, 8), 8);
  h.flags = static_cast<std::uint32_t>(get_be(raw.subspan(20, 4), 4));
  return h;
}

Bytes header_pad(ByteView conv_secret, unsigned slot, const std::string& rel_path) {
  Bytes msg = to_bytes("snet-header");
  put_be(msg, slot, 1);
  append(msg, to_bytes(rel_path));
  return crypto::prf_expand(conv_secret, msg, kHeaderBytes);
}

Bytes mask_header(const ShareFileHeader& h, ByteView conv_secret, unsigned slot, const std::string& rel_path) {
  auto out = encode_header(h);
  const auto pad = header_pad(conv_secret, slot, rel_path);
  for (std::size_t i = 0; i < kHeaderBytes; ++i) out[i] ^= pad[i];
  return out;
}

ShareFileHeader unmask_header(ByteView masked, ByteView conv_secret, unsigned slot, const std::string& rel_path) {
  if (masked.size() < kHeaderBytes) fail(ErrorCode::kCorruptState, "short share header");
  Bytes raw(masked.begin(), masked.begin() + kHeaderBytes);
  const auto pad = header_pad(conv_secret, slot, rel_path);
  for (std::size_t i = 0; i < kHeaderBytes; ++i) raw[i] ^= pad[i];
  auto h = decode_header(raw);
  if (h.format_version != kFormatVersion) {
    fail(ErrorCode::kCorruptState, "share header of " + rel_path + " does not unmask");
  }
  return h;
}

}  // namespace snet::sync
