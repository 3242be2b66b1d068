#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sdwan {

// One edge router / cloud instance. Rates that are absent mean the provider
// does not offer that billing method on this node.
struct NodeSpec {
  int id = 0;
  std::string name;
  std::string public_address;
  double max_egress_mbps = 0.0;
  std::optional<double> payg_usd_per_mbps_hour;
  std::optional<double> pfdt_usd_per_gb;

  bool operator==(const NodeSpec&) const = default;
};

struct LinkSpec {
  int src = 0;
  int dst = 0;
  double rtt_ms = 0.0;

  double rtt_seconds() const { return rtt_ms / 1000.0; }

  bool operator==(const LinkSpec&) const = default;
};

enum class LinkMode { kDirected, kUndirected };

// Validated, immutable directed graph of edge routers. Nodes are stored in id
// order; links are sorted by (src, dst). In undirected mode every link has its
// reverse twin with the same rtt.
class Topology {
 public:
  // Validates every invariant and expands undirected links. Throws InputError
  // naming the offending node or link.
  static Topology Create(std::vector<NodeSpec> nodes, std::vector<LinkSpec> links,
                         LinkMode mode);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<LinkSpec>& links() const { return links_; }
  const NodeSpec& node(int id) const { return nodes_.at(id); }
  LinkMode mode() const { return mode_; }
  bool contains(int id) const { return id >= 0 && id < size(); }

  // Outgoing links of `id`, ascending by destination.
  std::span<const LinkSpec> out_links(int id) const;
  const LinkSpec* find_link(int src, int dst) const;

  // Same graph with the rtt of links()[i] replaced by rtts_ms[i].
  Topology WithRtts(std::span<const double> rtts_ms) const;

  bool operator==(const Topology&) const = default;

 private:
  Topology() = default;

  std::vector<NodeSpec> nodes_;
  std::vector<LinkSpec> links_;
  std::vector<std::size_t> out_begin_;  // CSR offsets into links_
  LinkMode mode_ = LinkMode::kUndirected;
};

Topology TopologyFromJson(const nlohmann::json& doc, LinkMode mode);
Topology ParseTopology(std::string_view text, LinkMode mode);
Topology LoadTopology(const std::filesystem::path& path, LinkMode mode);

// Emits the expanded directed link set; reloading in the same mode yields an
// equal Topology.
nlohmann::json TopologyToJson(const Topology& topology);

}  // namespace sdwan
