#include "sdwan/net_address.hpp"

#include <arpa/inet.h>

#include <charconv>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "sdwan/errors.hpp"

namespace sdwan {

IpAddress IpAddress::Parse(std::string_view text) {
  const std::string s(text);
  IpAddress a;
  if (inet_pton(AF_INET, s.c_str(), a.bytes_.data()) == 1) {
    a.family_ = IpFamily::kV4;
    return a;
  }
  if (inet_pton(AF_INET6, s.c_str(), a.bytes_.data()) == 1) {
    a.family_ = IpFamily::kV6;
    return a;
  }
  throw InputError(fmt::format("'{}' is not an IP address", text));
}

std::string IpAddress::ToString() const {
  char buf[INET6_ADDRSTRLEN] = {};
  const int af = family_ == IpFamily::kV4 ? AF_INET : AF_INET6;
  inet_ntop(af, bytes_.data(), buf, sizeof buf);
  return buf;
}

bool IsIpLiteral(std::string_view text) {
  try {
    IpAddress::Parse(text);
    return true;
  } catch (const InputError&) {
    return false;
  }
}

IpPrefix::IpPrefix(IpAddress address, int length) : address_(address), length_(length) {
  if (length < 0 || length > address.bit_width()) {
    throw InputError(fmt::format("prefix length {} invalid for {}", length, address.ToString()));
  }
}

IpPrefix IpPrefix::Parse(std::string_view text) {
  const auto slash = text.find('/');
  const IpAddress addr = IpAddress::Parse(text.substr(0, slash));
  if (slash == std::string_view::npos) return Host(addr);
  const std::string_view len_text = text.substr(slash + 1);
  int length = -1;
  auto [ptr, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), length);
  if (ec != std::errc() || ptr != len_text.data() + len_text.size()) {
    throw InputError(fmt::format("'{}' has an invalid prefix length", text));
  }
  return IpPrefix(addr, length);
}

IpAddress IpPrefix::network() const {
  IpAddress n = address_;
  for (int bit = length_; bit < n.bit_width(); ++bit) {
    n.bytes_[bit / 8] &= static_cast<std::uint8_t>(~(0x80u >> (bit % 8)));
  }
  return n;
}

bool IpPrefix::Contains(const IpAddress& a) const {
  if (a.family() != address_.family()) return false;
  return IpPrefix(a, length_).network() == network();
}

bool IpPrefix::Overlaps(const IpPrefix& other) const {
  if (other.address_.family() != address_.family()) return false;
  return length_ <= other.length_ ? Contains(other.address_) : other.Contains(address_);
}

std::string IpPrefix::ToString() const {
  return fmt::format("{}/{}", address_.ToString(), length_);
}

std::uint64_t UsableHostCount(const IpPrefix& subnet) {
  const int host_bits = subnet.address().bit_width() - subnet.length();
  if (host_bits >= 64) return std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t size = std::uint64_t{1} << host_bits;
  if (subnet.address().family() == IpFamily::kV4) return size >= 4 ? size - 2 : 0;
  return size - 1;
}

IpAddress AddToAddress(const IpAddress& base, std::uint64_t offset) {
  IpAddress out = base;
  const int last = base.family() == IpFamily::kV4 ? 3 : 15;
  unsigned carry = 0;
  for (int i = last; i >= 0 && (offset != 0 || carry != 0); --i) {
    const unsigned sum = out.bytes_[i] + static_cast<unsigned>(offset & 0xff) + carry;
    out.bytes_[i] = static_cast<std::uint8_t>(sum & 0xff);
    carry = sum >> 8;
    offset >>= 8;
  }
  return out;
}

IpAddress NthHost(const IpPrefix& subnet, std::uint64_t n) {
  if (n == 0 || n > UsableHostCount(subnet)) {
    throw InputError(fmt::format("subnet {} has {} usable host addresses, need {}",
                                 subnet.ToString(), UsableHostCount(subnet), n));
  }
  return AddToAddress(subnet.network(), n);
}

}  // namespace sdwan
