#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdwan/keys.hpp"
#include "sdwan/net_address.hpp"
#include "sdwan/planner.hpp"
#include "sdwan/topology.hpp"

namespace sdwan {

struct PeerEntry {
  Key32 public_key{};
  std::string endpoint;  // host:port, [v6]:port
  std::vector<IpPrefix> allowed_ips;
  std::optional<int> keepalive_s;

  bool operator==(const PeerEntry&) const = default;
};

// One node's wg-quick interface. Peers are ordered toward-source first, then
// toward-destination.
struct TunnelSpec {
  int node_id = 0;
  IpPrefix overlay_address;  // host address with the overlay subnet's length
  int listen_port = 0;
  KeyPair keypair;
  std::vector<PeerEntry> peers;

  bool is_relay() const { return peers.size() == 2; }
  bool operator==(const TunnelSpec&) const = default;
};

struct TunnelOptions {
  IpPrefix overlay_subnet = IpPrefix::Parse("10.44.0.0/24");
  int base_port = 51820;
  std::optional<int> keepalive_s = 25;
  // Operator-supplied private keys by node id; other nodes get fresh keys.
  std::map<int, Key32> private_keys;
};

// Chains one tunnel per hop of plan.path. Node i of the path gets the i-th
// usable host of the overlay subnet; its toward-destination peer routes every
// downstream overlay host and its toward-source peer every upstream one.
// Throws InputError for paths shorter than 2, subnet exhaustion, or duplicate
// public keys.
std::vector<TunnelSpec> BuildTunnels(const Plan& plan, const Topology& topology,
                                     const TunnelOptions& options, EntropySource& entropy);

// wg-quick INI. Begins with a "# node <id>" comment; relays get a forwarding
// comment. Interface keys: PrivateKey, Address, ListenPort. Peer keys:
// PublicKey, Endpoint, AllowedIPs, PersistentKeepalive.
std::string RenderConf(const TunnelSpec& spec);

// Inverse of RenderConf. Throws InputError on malformed input.
TunnelSpec ParseConf(std::string_view text);

std::string FormatEndpoint(const std::string& host, int port);

// Conf file name per spec: the node name with characters outside
// [A-Za-z0-9._-] replaced by '_', suffixed "-<id>" on collision, plus ".conf".
std::vector<std::string> ConfFileNames(const std::vector<TunnelSpec>& specs,
                                       const Topology& topology);

// file stem -> {node_id, name, public_address, conf, public_key}.
nlohmann::json BuildManifest(const std::vector<TunnelSpec>& specs, const Topology& topology);

// Reads {"<node id>": "<base64 private key>", ...}.
std::map<int, Key32> ParsePrivateKeyFile(std::string_view text);

}  // namespace sdwan
