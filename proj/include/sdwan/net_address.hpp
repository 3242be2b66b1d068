#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sdwan {

enum class IpFamily { kV4, kV6 };

class IpAddress {
 public:
  // Throws InputError on anything that is not a literal IPv4/IPv6 address.
  static IpAddress Parse(std::string_view text);

  IpFamily family() const { return family_; }
  int bit_width() const { return family_ == IpFamily::kV4 ? 32 : 128; }
  std::string ToString() const;

  // Big-endian; IPv4 uses the first 4 bytes.
  const std::array<std::uint8_t, 16>& bytes() const { return bytes_; }

  auto operator<=>(const IpAddress&) const = default;

 private:
  IpFamily family_ = IpFamily::kV4;
  std::array<std::uint8_t, 16> bytes_{};

  friend class IpPrefix;
  friend IpAddress AddToAddress(const IpAddress&, std::uint64_t);
};

class IpPrefix {
 public:
  IpPrefix() = default;
  IpPrefix(IpAddress address, int length);

  // "a.b.c.d/len" or "x::y/len"; a bare address means a host prefix.
  static IpPrefix Parse(std::string_view text);
  static IpPrefix Host(const IpAddress& address) { return {address, address.bit_width()}; }

  const IpAddress& address() const { return address_; }
  int length() const { return length_; }
  IpAddress network() const;
  bool Contains(const IpAddress& a) const;
  bool Overlaps(const IpPrefix& other) const;
  std::string ToString() const;

  auto operator<=>(const IpPrefix&) const = default;

 private:
  IpAddress address_;
  int length_ = 0;
};

// Usable host addresses: IPv4 excludes the network and broadcast address,
// IPv6 excludes the subnet-router address. Saturates at UINT64_MAX.
std::uint64_t UsableHostCount(const IpPrefix& subnet);

// The n-th usable host (1-based) of `subnet`. Throws InputError when the
// subnet has fewer than n usable hosts.
IpAddress NthHost(const IpPrefix& subnet, std::uint64_t n);

bool IsIpLiteral(std::string_view text);

}  // namespace sdwan
