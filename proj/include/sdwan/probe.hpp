#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdwan/topology.hpp"

namespace sdwan {

// Measures one round trip between two nodes. Implementations must be safe to
// call concurrently.
class RttProber {
 public:
  virtual ~RttProber() = default;
  virtual std::optional<double> MeasureMs(const NodeSpec& from, const NodeSpec& to) = 0;
};

// Runs a shell command per attempt and parses "time=<x> ms" from its output.
// `{src}` and `{dst}` in the template expand to the endpoints' public
// addresses, e.g. "ssh {src} ping -n -c 1 {dst}".
class CommandRttProber : public RttProber {
 public:
  static constexpr const char* kDefaultTemplate = "ping -n -c 1 -W 2 {dst}";

  explicit CommandRttProber(std::string command_template = kDefaultTemplate);

  std::optional<double> MeasureMs(const NodeSpec& from, const NodeSpec& to) override;

  // False when the template's executable cannot be found on PATH.
  bool Available() const;

  const std::string& command_template() const { return template_; }

 private:
  std::string template_;
};

// Parses the first "time=<x> ms" (or "time<x ms") value from ping output.
std::optional<double> ParsePingTimeMs(const std::string& output);

double Median(std::vector<double> samples);

struct ProbeReport {
  Topology topology;
  std::vector<std::string> warnings;
};

// Replaces every link rtt with the median of its successful attempts. Links
// with no successful attempt keep their rtt and produce a warning. Links are
// probed concurrently; undirected topologies are probed once per node pair.
ProbeReport ProbeRtts(const Topology& topology, RttProber& prober, int attempts);

}  // namespace sdwan
