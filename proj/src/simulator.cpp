#include "sdwan/simulator.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace sdwan {

TransferEstimate SimulateTransfer(const Topology& topology, std::span<const int> path,
                                  const BillingAssignment& configs, double data_gb) {
  TransferEstimate est;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const int from = path[i];
    const int to = path[i + 1];
    const LinkSpec* link = topology.find_link(from, to);
    if (link == nullptr) {
      throw std::invalid_argument(fmt::format("no link {} -> {} in topology", from, to));
    }
    auto it = configs.find(from);
    if (it == configs.end() || it->second.method == BillingMethod::kNone) {
      throw std::invalid_argument(fmt::format("path node {} has no billing config", from));
    }
    est.latency_s += EdgeLatency(link->rtt_seconds(), data_gb, it->second.bandwidth_mbps);
    est.cost_usd += NodeCost(topology.node(from), it->second, data_gb);
  }
  return est;
}

Route NaiveBaseline(const Topology& topology, const TransferRequest& request) {
  ValidateRequest(topology, request);
  // Dijkstra over (hops, summed rtt, path) keys.
  struct Key {
    int hops;
    double rtt_s;
    std::vector<int> path;
    bool operator>(const Key& o) const {
      return std::tie(hops, rtt_s, path) > std::tie(o.hops, o.rtt_s, o.path);
    }
  };
  std::vector<std::optional<Key>> best(topology.size());
  std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;
  best[request.source] = Key{0, 0.0, {request.source}};
  queue.push(*best[request.source]);
  while (!queue.empty()) {
    Key cur = queue.top();
    queue.pop();
    const int node = cur.path.back();
    if (best[node]->path != cur.path) continue;  // superseded
    if (node == request.destination) break;
    for (const LinkSpec& link : topology.out_links(node)) {
      Key next{cur.hops + 1, cur.rtt_s + link.rtt_seconds(), cur.path};
      next.path.push_back(link.dst);
      if (!best[link.dst] || *best[link.dst] > next) {
        best[link.dst] = next;
        queue.push(std::move(next));
      }
    }
  }
  if (!best[request.destination]) {
    throw std::invalid_argument(fmt::format("no path from {} to {}", request.source,
                                            request.destination));
  }
  Route route;
  route.path = best[request.destination]->path;
  for (std::size_t i = 0; i + 1 < route.path.size(); ++i) {
    const NodeSpec& node = topology.node(route.path[i]);
    route.configs[node.id] = {
        node.pfdt_usd_per_gb ? BillingMethod::kPfdt : BillingMethod::kPayg, node.max_egress_mbps};
  }
  return route;
}

ReportRow RowForRoute(const Topology& topology, const TransferRequest& request,
                      std::string label, const std::vector<int>& path,
                      const BillingAssignment& configs) {
  const TransferEstimate est = SimulateTransfer(topology, path, configs, request.data_gb);
  ReportRow row;
  row.label = std::move(label);
  row.path = path;
  row.latency_s = est.latency_s;
  row.cost_usd = est.cost_usd;
  row.feasible = est.cost_usd <= request.budget_usd;
  return row;
}

SimulationReport Compare(const Topology& topology, const TransferRequest& request,
                         BillingRule rule, OracleOptions oracle) {
  SimulationReport report;
  report.request = request;
  report.rule = rule;

  const Discovery discovery = DiscoverPathTraced(topology, request, rule);
  std::optional<double> planner_latency;
  if (discovery.plan) {
    ReportRow row = RowForRoute(topology, request, "planner", discovery.plan->path,
                                discovery.plan->configs);
    row.note = fmt::format("fraction_k={}", discovery.plan->fraction_k);
    planner_latency = row.latency_s;
    report.rows.push_back(std::move(row));
  } else {
    report.rows.push_back({"planner", {}, std::nullopt, std::nullopt, false,
                           "insufficient budget"});
  }

  const Route naive = NaiveBaseline(topology, request);
  ReportRow naive_row = RowForRoute(topology, request, "naive", naive.path, naive.configs);
  const double naive_latency = *naive_row.latency_s;
  report.rows.push_back(std::move(naive_row));

  if (topology.size() <= oracle.max_nodes || oracle.allow_large) {
    std::optional<Plan> best;
    for (double k : discovery.fractions_tried) {
      const WeightBuild build = BuildWeights(topology, request, k, rule);
      auto found = OracleSearch(build.weights, request.source, request.destination,
                                request.budget_usd, oracle);
      if (!found) continue;
      if (!best || std::tie(found->total_latency, found->total_cost) <
                       std::tie(best->predicted_latency_s, best->predicted_cost_usd)) {
        best = MakePlan(build, *found, k, 0);
      }
    }
    if (best) {
      ReportRow row = RowForRoute(topology, request, "oracle", best->path, best->configs);
      row.note = fmt::format("fraction_k={}", best->fraction_k);
      report.rows.push_back(std::move(row));
    } else {
      report.rows.push_back({"oracle", {}, std::nullopt, std::nullopt, false,
                             "no feasible path on the planner's fraction grid"});
    }
  }

  if (planner_latency) {
    report.improvement =
        naive_latency > 0.0 ? (naive_latency - *planner_latency) / naive_latency : 0.0;
  }
  return report;
}

nlohmann::json ReportToJson(const SimulationReport& report) {
  using nlohmann::json;
  json rows = json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"label", r.label},
                    {"path", r.path},
                    {"latency_s", r.latency_s ? json(*r.latency_s) : json(nullptr)},
                    {"cost_usd", r.cost_usd ? json(*r.cost_usd) : json(nullptr)},
                    {"feasible", r.feasible},
                    {"note", r.note}});
  }
  const TransferRequest& q = report.request;
  return {{"baseline_definition", kNaiveDefinition},
          {"request",
           {{"source", q.source},
            {"destination", q.destination},
            {"data_gb", q.data_gb},
            {"budget_usd", q.budget_usd},
            {"max_iterations", q.max_iterations},
            {"rule", ToString(report.rule)}}},
          {"rows", std::move(rows)},
          {"improvement", report.improvement ? json(*report.improvement) : json(nullptr)}};
}

std::string RenderReportTable(const SimulationReport& report) {
  const TransferRequest& q = report.request;
  std::string out = fmt::format("# {}\n# {} -> {}, {} GB, budget {} USD, rule {}\n",
                                kNaiveDefinition, q.source, q.destination, q.data_gb,
                                q.budget_usd, ToString(report.rule));
  auto line = [&out](std::string_view label, std::string_view path, std::string_view latency,
                      std::string_view cost, std::string_view feasible, std::string_view note) {
    std::string row = fmt::format("{:<8} {:<20} {:>12} {:>10} {:<8} {}", label, path, latency,
                                  cost, feasible, note);
    row.erase(row.find_last_not_of(' ') + 1);
    out += row + "\n";
  };
  line("label", "path", "latency_s", "cost_usd", "feasible", "note");
  for (const ReportRow& r : report.rows) {
    line(r.label, r.path.empty() ? "-" : fmt::format("{}", fmt::join(r.path, ">")),
         r.latency_s ? fmt::format("{:.2f}", *r.latency_s) : "-",
         r.cost_usd ? fmt::format("{:.4f}", *r.cost_usd) : "-", r.feasible ? "yes" : "no",
         r.note);
  }
  out += report.improvement ? fmt::format("improvement {:.2f}%\n", *report.improvement * 100.0)
                            : std::string("improvement -\n");
  return out;
}

}  // namespace sdwan
