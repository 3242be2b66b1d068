#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace sdwan {

// Dense per-edge weights for the two-criterion search: `cost` is capped and
// `latency` is minimized. Absent edges are never read.
class WeightMatrices {
 public:
  explicit WeightMatrices(int node_count);

  // Throws std::invalid_argument on self-loops, repeated edges, out-of-range
  // ids and negative or non-finite weights.
  void AddEdge(int from, int to, double cost, double latency);

  int size() const { return n_; }
  bool has_edge(int from, int to) const { return present_[index(from, to)]; }
  double cost(int from, int to) const { return cost_[index(from, to)]; }
  double latency(int from, int to) const { return latency_[index(from, to)]; }
  // Ascending by id.
  std::span<const int> successors(int from) const { return successors_.at(from); }

 private:
  std::size_t index(int from, int to) const {
    return static_cast<std::size_t>(from) * n_ + to;
  }

  int n_;
  std::vector<double> cost_;
  std::vector<double> latency_;
  std::vector<bool> present_;
  std::vector<std::vector<int>> successors_;
};

struct PathResult {
  std::vector<int> path;
  double total_cost = 0.0;
  double total_latency = 0.0;

  bool operator==(const PathResult&) const = default;
};

// Sums both weights along `path` in order. Throws std::invalid_argument if a
// hop is not an edge.
PathResult RecomputeTotals(const WeightMatrices& weights, std::vector<int> path);

// Two-weight Dijkstra variant: pops the frontier label with least accumulated
// latency, returns at the first destination pop, and inserts a successor label
// only if its accumulated cost stays within `cost_cap` and its latency strictly
// beats the best latency recorded for that node. One best latency per node
// means feasible paths can be pruned; the result is feasible but not always
// optimal. Ties on the frontier break by (cost, node id).
std::optional<PathResult> LabelSearch(const WeightMatrices& weights, int source,
                                      int destination, double cost_cap);

struct OracleOptions {
  int max_nodes = 12;
  bool allow_large = false;
};

// Exact answer by enumerating all simple paths: least total latency among
// paths with total cost <= cost_cap, ties by lower cost then lexicographic
// path. Exponential; refuses graphs above options.max_nodes unless
// allow_large is set.
std::optional<PathResult> OracleSearch(const WeightMatrices& weights, int source,
                                       int destination, double cost_cap,
                                       OracleOptions options = {});

inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();

}  // namespace sdwan
