#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdwan/planner.hpp"

namespace sdwan {

struct TransferEstimate {
  double latency_s = 0.0;
  double cost_usd = 0.0;
};

// Store-and-forward: each hop propagates and retransmits the full payload at
// its sender's configured bandwidth; each sender is billed for the payload.
// Throws std::invalid_argument for a hop that is not a link or a sender
// without a billing config.
TransferEstimate SimulateTransfer(const Topology& topology, std::span<const int> path,
                                  const BillingAssignment& configs, double data_gb);

struct Route {
  std::vector<int> path;
  BillingAssignment configs;
};

// Fewest hops, ties by summed rtt then lexicographic path; every sender at its
// full egress cap on PFDT (PAYG when the node has no PFDT rate). Ignores the
// budget. Throws std::invalid_argument when no path exists.
Route NaiveBaseline(const Topology& topology, const TransferRequest& request);

inline constexpr const char* kNaiveDefinition =
    "naive = fewest hops (ties: summed rtt, then lexicographic), full egress bandwidth, PFDT "
    "billing, budget ignored";

struct ReportRow {
  std::string label;
  std::vector<int> path;
  std::optional<double> latency_s;
  std::optional<double> cost_usd;
  bool feasible = false;
  std::string note;
};

struct SimulationReport {
  TransferRequest request;
  BillingRule rule = BillingRule::kThreshold;
  std::vector<ReportRow> rows;
  // (naive - planner) / naive latency; absent when the planner found nothing.
  std::optional<double> improvement;
};

// Rows: planner, naive baseline, and for graphs within the oracle guard the
// exact optimum over every bandwidth fraction the planner evaluated.
SimulationReport Compare(const Topology& topology, const TransferRequest& request,
                         BillingRule rule = BillingRule::kThreshold,
                         OracleOptions oracle = {});

ReportRow RowForRoute(const Topology& topology, const TransferRequest& request,
                      std::string label, const std::vector<int>& path,
                      const BillingAssignment& configs);

nlohmann::json ReportToJson(const SimulationReport& report);
std::string RenderReportTable(const SimulationReport& report);

}  // namespace sdwan
