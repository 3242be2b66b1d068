#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>

namespace sdwan {

using Key32 = std::array<std::uint8_t, 32>;

// Curve25519 key pair as WireGuard uses it.
struct KeyPair {
  Key32 private_key{};
  Key32 public_key{};

  bool operator==(const KeyPair&) const = default;
};

// Clears bits 0-2 of byte 0, clears bit 7 and sets bit 6 of byte 31.
Key32 ClampPrivateKey(Key32 key);

// Clamps `entropy` into a private key and derives the public key by X25519
// scalar multiplication with the base point.
KeyPair GenerateKeyPair(const Key32& entropy);

// X25519(scalar, u). The scalar is clamped as the function defines.
Key32 ScalarMult(const Key32& scalar, const Key32& u_coordinate);

// Standard base64, 44 characters.
std::string EncodeKey(const Key32& key);
// Throws InputError unless `text` is base64 of exactly 32 bytes.
Key32 DecodeKey(std::string_view text);

class EntropySource {
 public:
  virtual ~EntropySource() = default;
  virtual Key32 Next() = 0;
};

// Operating system CSPRNG.
class SystemEntropy : public EntropySource {
 public:
  Key32 Next() override;
};

// Reproducible stream for tests and --seed: block i is ChaCha20 output keyed
// by (seed, i). Never use for real deployments.
class SeededEntropy : public EntropySource {
 public:
  explicit SeededEntropy(std::uint64_t seed) : seed_(seed) {}
  Key32 Next() override;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::mutex mu_;
};

}  // namespace sdwan
