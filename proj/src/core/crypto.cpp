#include "snet/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <memory>

#include "snet/error.hpp"

namespace snet::crypto {

Digest sha256(ByteView data) {
  Digest out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Digest hmac_sha256(ByteView key, ByteView message) {
  Digest out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
           out.data(), &len) == nullptr) {
    fail(ErrorCode::kIoFailure, "HMAC failed");
  }
  return out;
}

Bytes prf_expand(ByteView key, ByteView message, std::size_t length) {
  Bytes out;
  out.reserve(length + 32);
  Bytes input(message.begin(), message.end());
  input.resize(message.size() + 4);
  for (std::uint32_t counter = 0; out.size() < length; ++counter) {
    for (int i = 0; i < 4; ++i) {
      input[message.size() + i] = static_cast<std::uint8_t>(counter >> (24 - 8 * i));
    }
    auto block = hmac_sha256(key, input);
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(length);
  return out;
}

Bytes aes128_ctr(ByteView key, ByteView iv, ByteView data) {
  if (key.size() != 16 || iv.size() != 16) fail(ErrorCode::kInvalidArgument, "aes128_ctr key/iv size");
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(),
                                                                       &EVP_CIPHER_CTX_free);
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ctr(), nullptr, key.data(), iv.data()) != 1) {
    fail(ErrorCode::kIoFailure, "EVP init failed");
  }
  Bytes out(data.size());
  int len = 0;
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, data.data(), static_cast<int>(data.size())) != 1) {
    fail(ErrorCode::kIoFailure, "EVP update failed");
  }
  return out;
}

std::string base64_encode(ByteView data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(), static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

Bytes base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) fail(ErrorCode::kInvalidArgument, "base64 length is not a multiple of 4");
  Bytes out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) fail(ErrorCode::kInvalidArgument, "malformed base64");
  // EVP_DecodeBlock counts padding as zero bytes.
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

}  // namespace snet::crypto
