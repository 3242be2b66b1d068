#include "sdwan/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "sdwan/errors.hpp"

namespace sdwan {
namespace {

using nlohmann::json;

void RejectUnknownKeys(const json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InputError(fmt::format("{}: unknown key '{}'", where, key));
    }
  }
}

const json& Require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(fmt::format("{}: missing key '{}'", where, key));
  return *it;
}

int RequireInt(const json& obj, const char* key, const std::string& where) {
  const json& v = Require(obj, key, where);
  if (!v.is_number_integer()) {
    throw InputError(fmt::format("{}: '{}' must be an integer", where, key));
  }
  return v.get<int>();
}

double RequireNumber(const json& obj, const char* key, const std::string& where) {
  const json& v = Require(obj, key, where);
  if (!v.is_number()) throw InputError(fmt::format("{}: '{}' must be a number", where, key));
  return v.get<double>();
}

std::string RequireString(const json& obj, const char* key, const std::string& where) {
  const json& v = Require(obj, key, where);
  if (!v.is_string()) throw InputError(fmt::format("{}: '{}' must be a string", where, key));
  return v.get<std::string>();
}

std::optional<double> OptionalRate(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw InputError(fmt::format("{}: '{}' must be a number or null", where, key));
  }
  return it->get<double>();
}

void ValidateNode(const NodeSpec& n) {
  const std::string where = fmt::format("node {} ('{}')", n.id, n.name);
  if (!(n.max_egress_mbps > 0.0) || !std::isfinite(n.max_egress_mbps)) {
    throw InputError(fmt::format("{}: max_egress_mbps must be positive and finite, got {}",
                                 where, n.max_egress_mbps));
  }
  auto check_rate = [&](const std::optional<double>& rate, const char* label) {
    if (rate && (!(*rate >= 0.0) || !std::isfinite(*rate))) {
      throw InputError(fmt::format("{}: {} must be non-negative and finite, got {}", where,
                                   label, *rate));
    }
  };
  check_rate(n.payg_usd_per_mbps_hour, "payg_usd_per_mbps_hour");
  check_rate(n.pfdt_usd_per_gb, "pfdt_usd_per_gb");
  if (!n.payg_usd_per_mbps_hour && !n.pfdt_usd_per_gb) {
    throw InputError(fmt::format("{}: at least one billing rate is required", where));
  }
}

}  // namespace

Topology Topology::Create(std::vector<NodeSpec> nodes, std::vector<LinkSpec> links,
                          LinkMode mode) {
  std::sort(nodes.begin(), nodes.end(),
            [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0 && nodes[i].id == nodes[i - 1].id) {
      throw InputError(fmt::format("duplicate node id {}", nodes[i].id));
    }
    if (nodes[i].id != static_cast<int>(i)) {
      throw InputError(fmt::format("node ids must be contiguous from 0; node '{}' has id {}",
                                   nodes[i].name, nodes[i].id));
    }
    ValidateNode(nodes[i]);
  }

  const int n = static_cast<int>(nodes.size());
  std::map<std::pair<int, int>, double> edges;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const LinkSpec& l = links[i];
    const std::string where = fmt::format("link {} ({} -> {})", i, l.src, l.dst);
    for (int end : {l.src, l.dst}) {
      if (end < 0 || end >= n) throw InputError(fmt::format("{}: unknown node id {}", where, end));
    }
    if (l.src == l.dst) throw InputError(fmt::format("{}: self-loop", where));
    if (!(l.rtt_ms >= 0.0) || !std::isfinite(l.rtt_ms)) {
      throw InputError(fmt::format("{}: rtt_ms must be non-negative and finite, got {}", where,
                                   l.rtt_ms));
    }
    if (!edges.emplace(std::pair{l.src, l.dst}, l.rtt_ms).second) {
      throw InputError(fmt::format("{}: duplicate directed edge", where));
    }
  }

  if (mode == LinkMode::kUndirected) {
    for (const LinkSpec& l : links) {
      auto [it, inserted] = edges.emplace(std::pair{l.dst, l.src}, l.rtt_ms);
      if (!inserted && it->second != l.rtt_ms) {
        throw InputError(fmt::format(
            "link {} -> {}: reverse edge has rtt {} ms, expected {} ms in undirected mode", l.src,
            l.dst, it->second, l.rtt_ms));
      }
    }
  }

  Topology t;
  t.nodes_ = std::move(nodes);
  t.mode_ = mode;
  t.links_.reserve(edges.size());
  for (const auto& [key, rtt] : edges) t.links_.push_back({key.first, key.second, rtt});
  t.out_begin_.assign(n + 1, 0);
  for (const LinkSpec& l : t.links_) ++t.out_begin_[l.src + 1];
  for (int i = 0; i < n; ++i) t.out_begin_[i + 1] += t.out_begin_[i];
  return t;
}

std::span<const LinkSpec> Topology::out_links(int id) const {
  if (!contains(id)) throw std::out_of_range(fmt::format("node id {} out of range", id));
  return std::span<const LinkSpec>(links_).subspan(out_begin_[id],
                                                   out_begin_[id + 1] - out_begin_[id]);
}

const LinkSpec* Topology::find_link(int src, int dst) const {
  if (!contains(src)) return nullptr;
  for (const LinkSpec& l : out_links(src)) {
    if (l.dst == dst) return &l;
  }
  return nullptr;
}

Topology Topology::WithRtts(std::span<const double> rtts_ms) const {
  if (rtts_ms.size() != links_.size()) {
    throw std::invalid_argument("WithRtts: one rtt per link required");
  }
  std::vector<LinkSpec> links = links_;
  for (std::size_t i = 0; i < links.size(); ++i) links[i].rtt_ms = rtts_ms[i];
  return Create(nodes_, std::move(links), mode_);
}

Topology TopologyFromJson(const json& doc, LinkMode mode) {
  if (!doc.is_object()) throw InputError("topology: document must be an object");
  RejectUnknownKeys(doc, {"nodes", "links"}, "topology");
  const json& jnodes = Require(doc, "nodes", "topology");
  const json& jlinks = Require(doc, "links", "topology");
  if (!jnodes.is_array()) throw InputError("topology: 'nodes' must be an array");
  if (!jlinks.is_array()) throw InputError("topology: 'links' must be an array");

  std::vector<NodeSpec> nodes;
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const json& jn = jnodes[i];
    const std::string where = fmt::format("nodes[{}]", i);
    if (!jn.is_object()) throw InputError(where + ": must be an object");
    RejectUnknownKeys(jn,
                      {"id", "name", "public_address", "max_egress_mbps",
                       "payg_usd_per_mbps_hour", "pfdt_usd_per_gb"},
                      where);
    NodeSpec n;
    n.id = RequireInt(jn, "id", where);
    n.name = RequireString(jn, "name", where);
    n.public_address = RequireString(jn, "public_address", where);
    n.max_egress_mbps = RequireNumber(jn, "max_egress_mbps", where);
    n.payg_usd_per_mbps_hour = OptionalRate(jn, "payg_usd_per_mbps_hour", where);
    n.pfdt_usd_per_gb = OptionalRate(jn, "pfdt_usd_per_gb", where);
    nodes.push_back(std::move(n));
  }

  std::vector<LinkSpec> links;
  for (std::size_t i = 0; i < jlinks.size(); ++i) {
    const json& jl = jlinks[i];
    const std::string where = fmt::format("links[{}]", i);
    if (!jl.is_object()) throw InputError(where + ": must be an object");
    RejectUnknownKeys(jl, {"src", "dst", "rtt_ms"}, where);
    links.push_back({RequireInt(jl, "src", where), RequireInt(jl, "dst", where),
                     RequireNumber(jl, "rtt_ms", where)});
  }
  return Topology::Create(std::move(nodes), std::move(links), mode);
}

Topology ParseTopology(std::string_view text, LinkMode mode) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(fmt::format("topology: parse error: {}", e.what()));
  }
  return TopologyFromJson(doc, mode);
}

Topology LoadTopology(const std::filesystem::path& path, LinkMode mode) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open topology file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ParseTopology(buf.str(), mode);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

json TopologyToJson(const Topology& topology) {
  json nodes = json::array();
  for (const NodeSpec& n : topology.nodes()) {
    json jn = {{"id", n.id},
               {"name", n.name},
               {"public_address", n.public_address},
               {"max_egress_mbps", n.max_egress_mbps}};
    jn["payg_usd_per_mbps_hour"] =
        n.payg_usd_per_mbps_hour ? json(*n.payg_usd_per_mbps_hour) : json(nullptr);
    jn["pfdt_usd_per_gb"] = n.pfdt_usd_per_gb ? json(*n.pfdt_usd_per_gb) : json(nullptr);
    nodes.push_back(std::move(jn));
  }
  json links = json::array();
  for (const LinkSpec& l : topology.links()) {
    links.push_back({{"src", l.src}, {"dst", l.dst}, {"rtt_ms", l.rtt_ms}});
  }
  return {{"nodes", std::move(nodes)}, {"links", std::move(links)}};
}

}  // namespace sdwan
