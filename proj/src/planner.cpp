#include "sdwan/planner.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "sdwan/errors.hpp"

namespace sdwan {

void ValidateRequest(const Topology& topology, const TransferRequest& request) {
  for (int id : {request.source, request.destination}) {
    if (!topology.contains(id)) {
      throw std::invalid_argument(
          fmt::format("node id {} not in topology of {} nodes", id, topology.size()));
    }
  }
  if (!(request.data_gb > 0.0) || !std::isfinite(request.data_gb)) {
    throw std::invalid_argument("data size must be positive and finite");
  }
  if (!(request.budget_usd >= 0.0)) throw std::invalid_argument("budget must be non-negative");
  if (request.max_iterations < 0) throw std::invalid_argument("iterations must be >= 0");
}

NodeBillingConfig Plan::config(int node) const {
  auto it = configs.find(node);
  return it == configs.end() ? NodeBillingConfig{} : it->second;
}

WeightBuild BuildWeights(const Topology& topology, const TransferRequest& request,
                         double fraction_k, BillingRule rule) {
  if (!(fraction_k > 0.0 && fraction_k <= 1.0)) {
    throw std::invalid_argument(fmt::format("fraction {} outside (0, 1]", fraction_k));
  }
  WeightBuild build{WeightMatrices(topology.size()), {}};
  build.configs.reserve(topology.size());
  for (const NodeSpec& node : topology.nodes()) {
    build.configs.push_back(
        SelectBilling(node, fraction_k * node.max_egress_mbps, request.data_gb, rule));
  }
  for (const NodeSpec& node : topology.nodes()) {
    const NodeBillingConfig& cfg = build.configs[node.id];
    const double cost = NodeCost(node, cfg, request.data_gb);
    for (const LinkSpec& link : topology.out_links(node.id)) {
      build.weights.AddEdge(link.src, link.dst, cost,
                            EdgeLatency(link.rtt_seconds(), request.data_gb, cfg.bandwidth_mbps));
    }
  }
  return build;
}

Plan MakePlan(const WeightBuild& build, const PathResult& found, double fraction_k,
              int iterations_used) {
  Plan plan;
  plan.path = found.path;
  for (std::size_t i = 0; i + 1 < found.path.size(); ++i) {
    plan.configs[found.path[i]] = build.configs.at(found.path[i]);
  }
  plan.predicted_cost_usd = found.total_cost;
  plan.predicted_latency_s = found.total_latency;
  plan.fraction_k = fraction_k;
  plan.iterations_used = iterations_used;
  return plan;
}

Discovery DiscoverPathTraced(const Topology& topology, const TransferRequest& request,
                             BillingRule rule) {
  ValidateRequest(topology, request);
  Discovery out;

  const WeightBuild full = BuildWeights(topology, request, 1.0, rule);
  out.fractions_tried.push_back(1.0);
  if (auto found = LabelSearch(full.weights, request.source, request.destination,
                               request.budget_usd)) {
    out.plan = MakePlan(full, *found, 1.0, 0);
    return out;
  }

  double k = 0.5;
  double k_lower = 0.0;
  double k_upper = 1.0;
  for (int iter = 1; iter <= request.max_iterations; ++iter) {
    const double tried = k;
    out.fractions_tried.push_back(tried);
    const WeightBuild build = BuildWeights(topology, request, tried, rule);
    auto found =
        LabelSearch(build.weights, request.source, request.destination, request.budget_usd);
    if (found) {
      out.plan = MakePlan(build, *found, tried, request.max_iterations);
      k_lower = tried;
      k = (tried + k_upper) / 2.0;
    } else {
      k_upper = tried;
      k = (tried + k_lower) / 2.0;
    }
    out.steps.push_back({iter, tried, found.has_value(), k_lower, k_upper, k});
  }
  return out;
}

std::optional<Plan> DiscoverPath(const Topology& topology, const TransferRequest& request,
                                 BillingRule rule) {
  return DiscoverPathTraced(topology, request, rule).plan;
}

nlohmann::json PlanToJson(const Plan& plan) {
  nlohmann::json per_node = nlohmann::json::object();
  for (const auto& [id, cfg] : plan.configs) {
    per_node[std::to_string(id)] = {{"method", ToString(cfg.method)},
                                    {"bandwidth_mbps", cfg.bandwidth_mbps}};
  }
  return {{"path", plan.path},
          {"per_node", std::move(per_node)},
          {"predicted_cost_usd", plan.predicted_cost_usd},
          {"predicted_latency_s", plan.predicted_latency_s},
          {"fraction_k", plan.fraction_k},
          {"iterations_used", plan.iterations_used}};
}

Plan PlanFromJson(const nlohmann::json& doc) {
  using nlohmann::json;
  static const std::set<std::string> kKeys = {"path",        "per_node",
                                              "predicted_cost_usd", "predicted_latency_s",
                                              "fraction_k",  "iterations_used"};
  if (!doc.is_object()) throw InputError("plan: document must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKeys.count(key)) throw InputError(fmt::format("plan: unknown key '{}'", key));
  }
  for (const std::string& key : kKeys) {
    if (!doc.contains(key)) throw InputError(fmt::format("plan: missing key '{}'", key));
  }

  Plan plan;
  const json& path = doc["path"];
  if (!path.is_array()) throw InputError("plan: 'path' must be an array");
  for (const json& v : path) {
    if (!v.is_number_integer()) throw InputError("plan: path entries must be integers");
    plan.path.push_back(v.get<int>());
  }
  const json& per_node = doc["per_node"];
  if (!per_node.is_object()) throw InputError("plan: 'per_node' must be an object");
  for (const auto& [key, entry] : per_node.items()) {
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw InputError(fmt::format("plan: per_node key '{}' is not a node id", key));
    }
    if (!entry.is_object() || entry.size() != 2 || !entry.contains("method") ||
        !entry.contains("bandwidth_mbps") || !entry["method"].is_string() ||
        !entry["bandwidth_mbps"].is_number()) {
      throw InputError(fmt::format(
          "plan: per_node '{}' must be {{method: string, bandwidth_mbps: number}}", key));
    }
    NodeBillingConfig cfg;
    const std::string method = entry["method"].get<std::string>();
    if (method == "payg") {
      cfg.method = BillingMethod::kPayg;
    } else if (method == "pfdt") {
      cfg.method = BillingMethod::kPfdt;
    } else {
      throw InputError(fmt::format("plan: per_node '{}' has unknown method '{}'", key, method));
    }
    cfg.bandwidth_mbps = entry["bandwidth_mbps"].get<double>();
    if (!(cfg.bandwidth_mbps > 0.0)) {
      throw InputError(fmt::format("plan: per_node '{}' bandwidth must be positive", key));
    }
    plan.configs[id] = cfg;
  }
  auto number = [&](const char* key) {
    if (!doc[key].is_number()) throw InputError(fmt::format("plan: '{}' must be a number", key));
    return doc[key].get<double>();
  };
  plan.predicted_cost_usd = number("predicted_cost_usd");
  plan.predicted_latency_s = number("predicted_latency_s");
  plan.fraction_k = number("fraction_k");
  if (!doc["iterations_used"].is_number_integer()) {
    throw InputError("plan: 'iterations_used' must be an integer");
  }
  plan.iterations_used = doc["iterations_used"].get<int>();

  if (plan.path.empty()) throw InputError("plan: path is empty");
  std::set<int> senders(plan.path.begin(), plan.path.end() - 1);
  for (const auto& [id, cfg] : plan.configs) {
    if (!senders.count(id)) {
      throw InputError(fmt::format("plan: node {} is billed but does not send on the path", id));
    }
  }
  for (int id : senders) {
    if (!plan.configs.count(id)) {
      throw InputError(fmt::format("plan: path node {} has no billing config", id));
    }
  }
  return plan;
}

Plan ParsePlan(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(fmt::format("plan: parse error: {}", e.what()));
  }
  return PlanFromJson(doc);
}

void CheckPlanAgainst(const Topology& topology, const Plan& plan) {
  for (int id : plan.path) {
    if (!topology.contains(id)) {
      throw InputError(fmt::format("plan: node {} not in topology", id));
    }
  }
  std::set<int> seen;
  for (std::size_t i = 0; i < plan.path.size(); ++i) {
    if (!seen.insert(plan.path[i]).second) {
      throw InputError(fmt::format("plan: node {} repeats on the path", plan.path[i]));
    }
    if (i + 1 < plan.path.size() && !topology.find_link(plan.path[i], plan.path[i + 1])) {
      throw InputError(
          fmt::format("plan: no link {} -> {} in topology", plan.path[i], plan.path[i + 1]));
    }
  }
  for (const auto& [id, cfg] : plan.configs) {
    const NodeSpec& node = topology.node(id);
    if (cfg.bandwidth_mbps > node.max_egress_mbps) {
      throw InputError(fmt::format("plan: node {} bandwidth {} exceeds cap {}", id,
                                   cfg.bandwidth_mbps, node.max_egress_mbps));
    }
    if (cfg.method == BillingMethod::kPfdt && !node.pfdt_usd_per_gb) {
      throw InputError(fmt::format("plan: node {} has no PFDT rate", id));
    }
    if (cfg.method == BillingMethod::kPayg && !node.payg_usd_per_mbps_hour) {
      throw InputError(fmt::format("plan: node {} has no PAYG rate", id));
    }
  }
}

}  // namespace sdwan
