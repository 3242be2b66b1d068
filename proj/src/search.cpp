#include "sdwan/search.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "sdwan/errors.hpp"

namespace sdwan {

WeightMatrices::WeightMatrices(int node_count) : n_(node_count) {
  if (node_count < 0) throw std::invalid_argument("negative node count");
  const std::size_t cells = static_cast<std::size_t>(n_) * n_;
  cost_.assign(cells, 0.0);
  latency_.assign(cells, 0.0);
  present_.assign(cells, false);
  successors_.resize(n_);
}

void WeightMatrices::AddEdge(int from, int to, double cost, double latency) {
  if (from < 0 || from >= n_ || to < 0 || to >= n_) {
    throw std::invalid_argument(fmt::format("edge {} -> {}: node id out of range", from, to));
  }
  if (from == to) throw std::invalid_argument(fmt::format("edge {} -> {}: self-loop", from, to));
  if (has_edge(from, to)) {
    throw std::invalid_argument(fmt::format("edge {} -> {}: parallel edge", from, to));
  }
  if (!(cost >= 0.0) || !std::isfinite(cost) || !(latency >= 0.0) || !std::isfinite(latency)) {
    throw std::invalid_argument(
        fmt::format("edge {} -> {}: weights must be finite and non-negative", from, to));
  }
  const std::size_t i = index(from, to);
  cost_[i] = cost;
  latency_[i] = latency;
  present_[i] = true;
  auto& succ = successors_[from];
  succ.insert(std::upper_bound(succ.begin(), succ.end(), to), to);
}

PathResult RecomputeTotals(const WeightMatrices& weights, std::vector<int> path) {
  PathResult r{std::move(path), 0.0, 0.0};
  for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
    const int u = r.path[i];
    const int v = r.path[i + 1];
    if (u < 0 || u >= weights.size() || v < 0 || v >= weights.size() || !weights.has_edge(u, v)) {
      throw std::invalid_argument(fmt::format("path hop {} -> {} is not an edge", u, v));
    }
    r.total_cost += weights.cost(u, v);
    r.total_latency += weights.latency(u, v);
  }
  return r;
}

namespace {

void CheckEndpoints(const WeightMatrices& weights, int source, int destination) {
  for (int id : {source, destination}) {
    if (id < 0 || id >= weights.size()) {
      throw std::invalid_argument(fmt::format("node id {} out of range [0, {})", id,
                                              weights.size()));
    }
  }
}

struct Label {
  int node;
  double cost;
  double latency;
  int parent;  // index into the label arena, -1 for the source label
};

}  // namespace

std::optional<PathResult> LabelSearch(const WeightMatrices& weights, int source,
                                      int destination, double cost_cap) {
  CheckEndpoints(weights, source, destination);
  if (!(cost_cap >= 0.0)) throw std::invalid_argument("cost cap must be non-negative");

  std::vector<Label> labels{{source, 0.0, 0.0, -1}};
  std::vector<double> best_latency(weights.size(), kUnlimited);
  best_latency[source] = 0.0;

  // (latency, cost, node, label index); smallest first.
  using Entry = std::tuple<double, double, int, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  frontier.emplace(0.0, 0.0, source, 0);

  while (!frontier.empty()) {
    const auto [latency, cost, node, label_index] = frontier.top();
    frontier.pop();

    if (node == destination) {
      std::vector<int> path;
      for (int i = label_index; i != -1; i = labels[i].parent) path.push_back(labels[i].node);
      std::reverse(path.begin(), path.end());
      PathResult result = RecomputeTotals(weights, std::move(path));
      std::vector<bool> seen(weights.size(), false);
      for (int v : result.path) {
        if (seen[v]) throw InternalError("label search reconstructed a cyclic path");
        seen[v] = true;
      }
      if (result.total_cost != cost || result.total_latency != latency ||
          result.total_cost > cost_cap) {
        throw InternalError("label search reconstruction disagrees with the popped label");
      }
      return result;
    }

    for (int next : weights.successors(node)) {
      const double new_cost = cost + weights.cost(node, next);
      const double new_latency = latency + weights.latency(node, next);
      if (new_cost <= cost_cap && new_latency < best_latency[next]) {
        best_latency[next] = new_latency;
        labels.push_back({next, new_cost, new_latency, label_index});
        frontier.emplace(new_latency, new_cost, next, static_cast<int>(labels.size()) - 1);
      }
    }
  }
  return std::nullopt;
}

namespace {

class Enumerator {
 public:
  Enumerator(const WeightMatrices& w, int destination, double cap)
      : w_(w), destination_(destination), cap_(cap), on_path_(w.size(), false) {}

  void Run(int source) {
    path_.push_back(source);
    on_path_[source] = true;
    Visit(source, 0.0, 0.0);
  }

  std::optional<PathResult> best;

 private:
  void Visit(int node, double cost, double latency) {
    if (node == destination_) {
      Offer(cost, latency);
      return;
    }
    for (int next : w_.successors(node)) {
      if (on_path_[next]) continue;
      const double c = cost + w_.cost(node, next);
      // Costs are non-negative, so an over-cap prefix never recovers.
      if (c > cap_) continue;
      on_path_[next] = true;
      path_.push_back(next);
      Visit(next, c, latency + w_.latency(node, next));
      path_.pop_back();
      on_path_[next] = false;
    }
  }

  void Offer(double cost, double latency) {
    if (best && std::tie(best->total_latency, best->total_cost, best->path) <=
                    std::tie(latency, cost, path_)) {
      return;
    }
    best = PathResult{path_, cost, latency};
  }

  const WeightMatrices& w_;
  int destination_;
  double cap_;
  std::vector<bool> on_path_;
  std::vector<int> path_;
};

}  // namespace

std::optional<PathResult> OracleSearch(const WeightMatrices& weights, int source,
                                       int destination, double cost_cap,
                                       OracleOptions options) {
  CheckEndpoints(weights, source, destination);
  if (!(cost_cap >= 0.0)) throw std::invalid_argument("cost cap must be non-negative");
  if (weights.size() > options.max_nodes && !options.allow_large) {
    throw std::invalid_argument(fmt::format(
        "oracle search refuses {} nodes (limit {}); set allow_large to override",
        weights.size(), options.max_nodes));
  }
  Enumerator e(weights, destination, cost_cap);
  e.Run(source);
  return std::move(e.best);
}

}  // namespace sdwan
