#include "sdwan/tunnel.hpp"

#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "sdwan/errors.hpp"

namespace sdwan {

std::string FormatEndpoint(const std::string& host, int port) {
  if (host.find(':') != std::string::npos && IsIpLiteral(host)) {
    return fmt::format("[{}]:{}", host, port);
  }
  return fmt::format("{}:{}", host, port);
}

std::vector<TunnelSpec> BuildTunnels(const Plan& plan, const Topology& topology,
                                     const TunnelOptions& options, EntropySource& entropy) {
  const std::vector<int>& path = plan.path;
  if (path.size() < 2) throw InputError("tunnels need a path of at least 2 nodes");
  for (int id : path) {
    if (!topology.contains(id)) throw InputError(fmt::format("path node {} not in topology", id));
  }
  if (options.base_port <= 0 || options.base_port > 65535) {
    throw InputError(fmt::format("listen port {} out of range", options.base_port));
  }

  const IpPrefix& subnet = options.overlay_subnet;
  std::vector<IpAddress> hosts;
  std::vector<int> ports;
  std::map<std::string, int> address_uses;
  for (std::size_t i = 0; i < path.size(); ++i) {
    hosts.push_back(NthHost(subnet, i + 1));
    const int port = options.base_port + address_uses[topology.node(path[i]).public_address]++;
    if (port > 65535) throw InputError("listen ports exhausted");
    ports.push_back(port);
  }

  std::vector<TunnelSpec> specs(path.size());
  std::set<Key32> public_keys;
  for (std::size_t i = 0; i < path.size(); ++i) {
    TunnelSpec& s = specs[i];
    s.node_id = path[i];
    s.overlay_address = IpPrefix(hosts[i], subnet.length());
    s.listen_port = ports[i];
    auto preset = options.private_keys.find(path[i]);
    s.keypair = GenerateKeyPair(preset != options.private_keys.end() ? preset->second
                                                                     : entropy.Next());
    if (!public_keys.insert(s.keypair.public_key).second) {
      throw InputError(fmt::format("node {} would reuse another node's key", path[i]));
    }
  }

  auto peer_to = [&](std::size_t j, std::size_t first, std::size_t last) {
    PeerEntry p;
    p.public_key = specs[j].keypair.public_key;
    p.endpoint = FormatEndpoint(topology.node(path[j]).public_address, ports[j]);
    for (std::size_t k = first; k < last; ++k) p.allowed_ips.push_back(IpPrefix::Host(hosts[k]));
    p.keepalive_s = options.keepalive_s;
    return p;
  };
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) specs[i].peers.push_back(peer_to(i - 1, 0, i));
    if (i + 1 < path.size()) specs[i].peers.push_back(peer_to(i + 1, i + 1, path.size()));
  }
  return specs;
}

std::string RenderConf(const TunnelSpec& spec) {
  std::string out = fmt::format("# node {}\n", spec.node_id);
  if (spec.is_relay()) {
    out +=
        "# relay: forwards between its two peers; enable IP forwarding "
        "(sysctl net.ipv4.ip_forward=1 / net.ipv6.conf.all.forwarding=1)\n";
  }
  out += "[Interface]\n";
  out += fmt::format("PrivateKey = {}\n", EncodeKey(spec.keypair.private_key));
  out += fmt::format("Address = {}\n", spec.overlay_address.ToString());
  out += fmt::format("ListenPort = {}\n", spec.listen_port);
  for (const PeerEntry& p : spec.peers) {
    std::vector<std::string> allowed;
    for (const IpPrefix& prefix : p.allowed_ips) allowed.push_back(prefix.ToString());
    out += "\n[Peer]\n";
    out += fmt::format("PublicKey = {}\n", EncodeKey(p.public_key));
    out += fmt::format("Endpoint = {}\n", p.endpoint);
    out += fmt::format("AllowedIPs = {}\n", fmt::join(allowed, ", "));
    if (p.keepalive_s) out += fmt::format("PersistentKeepalive = {}\n", *p.keepalive_s);
  }
  return out;
}

namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int ParsePositiveInt(std::string_view v, std::string_view what, int line_no) {
  int out = 0;
  try {
    std::size_t used = 0;
    out = std::stoi(std::string(v), &used);
    if (used != v.size() || out < 0) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw InputError(fmt::format("conf line {}: invalid {} '{}'", line_no, what, v));
  }
  return out;
}

}  // namespace

TunnelSpec ParseConf(std::string_view text) {
  TunnelSpec spec;
  enum class Section { kNone, kInterface, kPeer } section = Section::kNone;
  bool have_node = false, have_private = false, have_address = false, have_port = false;
  bool seen_interface = false;
  std::set<std::string> seen_keys;
  int line_no = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = Trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (!have_node && line.substr(0, 7) == "# node ") {
        spec.node_id = ParsePositiveInt(Trim(line.substr(7)), "node id", line_no);
        have_node = true;
      }
      continue;
    }
    if (line == "[Interface]") {
      if (seen_interface) throw InputError("conf: more than one [Interface] section");
      section = Section::kInterface;
      seen_interface = true;
      seen_keys.clear();
      continue;
    }
    if (line == "[Peer]") {
      section = Section::kPeer;
      spec.peers.emplace_back();
      seen_keys.clear();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || section == Section::kNone) {
      throw InputError(fmt::format("conf line {}: unexpected '{}'", line_no, line));
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (!seen_keys.insert(key).second) {
      throw InputError(fmt::format("conf line {}: repeated key '{}'", line_no, key));
    }
    if (section == Section::kInterface) {
      if (key == "PrivateKey") {
        spec.keypair = GenerateKeyPair(DecodeKey(value));
        have_private = true;
      } else if (key == "Address") {
        spec.overlay_address = IpPrefix::Parse(value);
        have_address = true;
      } else if (key == "ListenPort") {
        spec.listen_port = ParsePositiveInt(value, "port", line_no);
        have_port = true;
      } else {
        throw InputError(fmt::format("conf line {}: unknown interface key '{}'", line_no, key));
      }
    } else {
      PeerEntry& peer = spec.peers.back();
      if (key == "PublicKey") {
        peer.public_key = DecodeKey(value);
      } else if (key == "Endpoint") {
        peer.endpoint = std::string(value);
      } else if (key == "AllowedIPs") {
        std::string list(value);
        std::istringstream items(list);
        std::string item;
        while (std::getline(items, item, ',')) peer.allowed_ips.push_back(IpPrefix::Parse(Trim(item)));
      } else if (key == "PersistentKeepalive") {
        peer.keepalive_s = ParsePositiveInt(value, "keepalive", line_no);
      } else {
        throw InputError(fmt::format("conf line {}: unknown peer key '{}'", line_no, key));
      }
    }
  }
  if (!have_node) throw InputError("conf: missing '# node <id>' header");
  if (!have_private || !have_address || !have_port) {
    throw InputError("conf: [Interface] needs PrivateKey, Address and ListenPort");
  }
  for (const PeerEntry& p : spec.peers) {
    if (p.public_key == Key32{} || p.endpoint.empty() || p.allowed_ips.empty()) {
      throw InputError("conf: every [Peer] needs PublicKey, Endpoint and AllowedIPs");
    }
  }
  return spec;
}

std::vector<std::string> ConfFileNames(const std::vector<TunnelSpec>& specs,
                                       const Topology& topology) {
  std::vector<std::string> names;
  std::set<std::string> used;
  for (const TunnelSpec& s : specs) {
    std::string stem = topology.node(s.node_id).name;
    for (char& c : stem) {
      const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
      if (!ok) c = '_';
    }
    if (stem.empty() || stem.front() == '.' || used.count(stem)) {
      stem += fmt::format("-{}", s.node_id);
    }
    used.insert(stem);
    names.push_back(stem + ".conf");
  }
  return names;
}

nlohmann::json BuildManifest(const std::vector<TunnelSpec>& specs, const Topology& topology) {
  const std::vector<std::string> files = ConfFileNames(specs, topology);
  nlohmann::json manifest = nlohmann::json::object();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const NodeSpec& node = topology.node(specs[i].node_id);
    const std::string stem = files[i].substr(0, files[i].size() - 5);
    manifest[stem] = {{"node_id", node.id},
                      {"name", node.name},
                      {"public_address", node.public_address},
                      {"conf", files[i]},
                      {"overlay_address", specs[i].overlay_address.address().ToString()},
                      {"public_key", EncodeKey(specs[i].keypair.public_key)}};
  }
  return manifest;
}

std::map<int, Key32> ParsePrivateKeyFile(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(fmt::format("key file: parse error: {}", e.what()));
  }
  if (!doc.is_object()) throw InputError("key file: must be an object of node id -> key");
  std::map<int, Key32> keys;
  for (const auto& [id_text, value] : doc.items()) {
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(id_text, &used);
      if (used != id_text.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw InputError(fmt::format("key file: '{}' is not a node id", id_text));
    }
    if (!value.is_string()) throw InputError(fmt::format("key file: node {} key must be a string", id));
    keys[id] = DecodeKey(value.get<std::string>());
  }
  return keys;
}

}  // namespace sdwan
