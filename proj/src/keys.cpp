#include "sdwan/keys.hpp"

#include <sodium.h>

#include <stdexcept>

#include <fmt/format.h>

#include "sdwan/errors.hpp"

namespace sdwan {
namespace {

void EnsureSodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

Key32 ClampPrivateKey(Key32 key) {
  key[0] &= 248;
  key[31] = static_cast<std::uint8_t>((key[31] & 127) | 64);
  return key;
}

KeyPair GenerateKeyPair(const Key32& entropy) {
  EnsureSodium();
  KeyPair kp;
  kp.private_key = ClampPrivateKey(entropy);
  if (crypto_scalarmult_curve25519_base(kp.public_key.data(), kp.private_key.data()) != 0) {
    throw std::runtime_error("X25519 base-point multiplication failed");
  }
  return kp;
}

Key32 ScalarMult(const Key32& scalar, const Key32& u_coordinate) {
  EnsureSodium();
  Key32 out{};
  if (crypto_scalarmult_curve25519(out.data(), scalar.data(), u_coordinate.data()) != 0) {
    throw std::runtime_error("X25519 produced the all-zero point");
  }
  return out;
}

std::string EncodeKey(const Key32& key) {
  EnsureSodium();
  constexpr int kVariant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_ENCODED_LEN(key.size(), kVariant), '\0');
  sodium_bin2base64(out.data(), out.size(), key.data(), key.size(), kVariant);
  out.resize(out.size() - 1);  // trailing NUL
  return out;
}

Key32 DecodeKey(std::string_view text) {
  EnsureSodium();
  Key32 key{};
  std::size_t len = 0;
  const char* end = nullptr;
  if (text.size() != 44 ||
      sodium_base642bin(key.data(), key.size(), text.data(), text.size(), nullptr, &len, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      len != key.size() || end != text.data() + text.size()) {
    throw InputError(fmt::format("'{}' is not a base64-encoded 32-byte key", text));
  }
  return key;
}

Key32 SystemEntropy::Next() {
  EnsureSodium();
  Key32 out{};
  randombytes_buf(out.data(), out.size());
  return out;
}

Key32 SeededEntropy::Next() {
  EnsureSodium();
  std::uint64_t block = 0;
  {
    std::lock_guard<std::mutex> lock(mu_);
    block = counter_++;
  }
  unsigned char seed[randombytes_SEEDBYTES] = {};
  for (int i = 0; i < 8; ++i) {
    seed[i] = static_cast<unsigned char>(seed_ >> (8 * i));
    seed[8 + i] = static_cast<unsigned char>(block >> (8 * i));
  }
  Key32 out{};
  randombytes_buf_deterministic(out.data(), out.size(), seed);
  return out;
}

}  // namespace sdwan
