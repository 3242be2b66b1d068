#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdwan/billing.hpp"
#include "sdwan/search.hpp"
#include "sdwan/topology.hpp"

namespace sdwan {

struct TransferRequest {
  int source = 0;
  int destination = 0;
  double data_gb = 0.0;
  double budget_usd = 0.0;
  int max_iterations = 10;
};

// Validates ids against `topology` and the numeric ranges. Throws
// std::invalid_argument.
void ValidateRequest(const Topology& topology, const TransferRequest& request);

// Billing of the nodes that send on a path, keyed by node id. Nodes that are
// absent are billed nothing (method none).
using BillingAssignment = std::map<int, NodeBillingConfig>;

struct Plan {
  std::vector<int> path;
  BillingAssignment configs;
  double predicted_cost_usd = 0.0;
  double predicted_latency_s = 0.0;
  double fraction_k = 1.0;
  int iterations_used = 0;

  NodeBillingConfig config(int node) const;

  bool operator==(const Plan&) const = default;
};

struct WeightBuild {
  WeightMatrices weights;
  std::vector<NodeBillingConfig> configs;  // one per node, never kNone
};

// Every node offers fraction_k of its egress cap and picks a billing method
// for it; each outgoing edge carries the sender's cost and the edge latency at
// the sender's configured bandwidth.
WeightBuild BuildWeights(const Topology& topology, const TransferRequest& request,
                         double fraction_k, BillingRule rule);

// Turns a search result on `build` into a Plan (on-path senders keep their
// configs, everything else is none).
Plan MakePlan(const WeightBuild& build, const PathResult& found, double fraction_k,
              int iterations_used);

// One binary-search step, recorded after the bracket update.
struct BracketStep {
  int iteration = 0;       // 1-based
  double tried_k = 0.0;    // fraction searched in this iteration
  bool success = false;
  double k_lower = 0.0;
  double k_upper = 0.0;
  double next_k = 0.0;
};

struct Discovery {
  std::optional<Plan> plan;
  std::vector<BracketStep> steps;       // empty when the full-bandwidth try succeeds
  std::vector<double> fractions_tried;  // 1.0 followed by each tried_k
};

// Tries every node at full bandwidth first; if the cheapest-latency path under
// the budget does not exist, binary-searches a global bandwidth fraction for
// exactly request.max_iterations rounds and keeps the last successful plan.
// No plan means the budget is insufficient (or no path exists).
Discovery DiscoverPathTraced(const Topology& topology, const TransferRequest& request,
                             BillingRule rule = BillingRule::kThreshold);

std::optional<Plan> DiscoverPath(const Topology& topology, const TransferRequest& request,
                                 BillingRule rule = BillingRule::kThreshold);

nlohmann::json PlanToJson(const Plan& plan);
Plan PlanFromJson(const nlohmann::json& doc);
Plan ParsePlan(std::string_view text);

// Throws InputError if `plan` does not fit `topology`: unknown ids, missing
// hops, billing on the wrong nodes or bandwidth above a node's cap.
void CheckPlanAgainst(const Topology& topology, const Plan& plan);

}  // namespace sdwan
