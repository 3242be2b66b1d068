#include "sdwan/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "sdwan/errors.hpp"
#include "sdwan/planner.hpp"
#include "sdwan/probe.hpp"
#include "sdwan/simulator.hpp"
#include "sdwan/topology.hpp"
#include "sdwan/tunnel.hpp"

namespace sdwan {
namespace {

namespace fs = std::filesystem;

struct TopologyArgs {
  std::string path;
  bool directed = false;
};

struct RequestArgs {
  int src = 0;
  int dst = 0;
  double data_gb = 0.0;
  double budget_usd = 0.0;
  int iterations = 10;
  std::string rule = "threshold";
};

void AddTopologyOptions(CLI::App* cmd, TopologyArgs& t) {
  cmd->add_option("--topology", t.path, "Topology document (JSON)")->required();
  cmd->add_flag("--directed", t.directed, "Treat links as directed instead of bidirectional");
}

void AddRequestOptions(CLI::App* cmd, RequestArgs& r) {
  cmd->add_option("--src", r.src, "Source node id")->required();
  cmd->add_option("--dst", r.dst, "Destination node id")->required();
  cmd->add_option("--data-gb", r.data_gb, "Payload size in GB (10^9 bytes)")->required();
  cmd->add_option("--budget-usd", r.budget_usd, "Spending cap in USD")->required();
  cmd->add_option("--iterations", r.iterations, "Bandwidth binary-search rounds")->capture_default_str();
  cmd->add_option("--rule", r.rule, "Billing selection rule")->capture_default_str()
      ->check(CLI::IsMember({"threshold", "exact-cost"}));
}

fs::path ResolveTopologyPath(const std::string& given) {
  std::vector<fs::path> candidates{given, given + ".json"};
  if (const char* dir = std::getenv(kFixtureDirEnv); dir != nullptr && *dir != '\0') {
    const fs::path name = fs::path(given).filename();
    candidates.push_back(fs::path(dir) / name);
    candidates.push_back(fs::path(dir) / (name.string() + ".json"));
  }
  std::error_code ec;
  for (const fs::path& p : candidates) {
    if (fs::is_regular_file(p, ec)) return p;
  }
  throw InputError(fmt::format("topology file '{}' not found", given));
}

Topology LoadTopologyArg(const TopologyArgs& t) {
  return LoadTopology(ResolveTopologyPath(t.path),
                      t.directed ? LinkMode::kDirected : LinkMode::kUndirected);
}

TransferRequest MakeRequest(const RequestArgs& r) {
  return {r.src, r.dst, r.data_gb, r.budget_usd, r.iterations};
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError(fmt::format("cannot write '{}'", path.string()));
  f << text;
}

void Emit(const std::string& out_path, const std::string& text, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    WriteFile(out_path, text);
  }
}

std::string Describe(const Topology& topology, const Plan& plan) {
  std::vector<std::string> hops;
  for (int id : plan.path) {
    const NodeBillingConfig cfg = plan.config(id);
    hops.push_back(cfg.method == BillingMethod::kNone
                       ? topology.node(id).name
                       : fmt::format("{} [{} @ {} Mbps]", topology.node(id).name,
                                     ToString(cfg.method), cfg.bandwidth_mbps));
  }
  return fmt::format("path {}\npredicted latency {:.3f} s, cost {:.4f} USD, fraction_k {}, "
                     "iterations {}\n",
                     fmt::join(hops, " -> "), plan.predicted_latency_s, plan.predicted_cost_usd,
                     plan.fraction_k, plan.iterations_used);
}

int RunPlan(const TopologyArgs& t, const RequestArgs& r, const std::string& out_path,
            std::ostream& out, std::ostream& err) {
  const Topology topology = LoadTopologyArg(t);
  const TransferRequest request = MakeRequest(r);
  const auto plan = DiscoverPath(topology, request, ParseBillingRule(r.rule));
  if (!plan) {
    err << fmt::format(
        "insufficient budget: no path from {} to {} within {} USD after {} iterations\n",
        request.source, request.destination, request.budget_usd, request.max_iterations);
    return kExitInfeasible;
  }
  Emit(out_path, PlanToJson(*plan).dump(2) + "\n", out);
  err << Describe(topology, *plan);
  return kExitOk;
}

struct RenderArgs {
  std::string plan;
  std::string subnet = "10.44.0.0/24";
  std::optional<std::uint64_t> seed;
  int base_port = 51820;
  int keepalive = 25;
  std::string keys;
  std::string out_dir = "out";
};

int RunRender(const TopologyArgs& t, const RenderArgs& a, std::ostream& err) {
  const Topology topology = LoadTopologyArg(t);
  const Plan plan = ParsePlan(ReadFile(a.plan));
  CheckPlanAgainst(topology, plan);

  TunnelOptions options;
  options.overlay_subnet = IpPrefix::Parse(a.subnet);
  options.base_port = a.base_port;
  options.keepalive_s = a.keepalive > 0 ? std::optional<int>(a.keepalive) : std::nullopt;
  if (!a.keys.empty()) options.private_keys = ParsePrivateKeyFile(ReadFile(a.keys));

  std::unique_ptr<EntropySource> entropy;
  if (a.seed) {
    entropy = std::make_unique<SeededEntropy>(*a.seed);
  } else {
    entropy = std::make_unique<SystemEntropy>();
  }
  const std::vector<TunnelSpec> specs = BuildTunnels(plan, topology, options, *entropy);
  const std::vector<std::string> files = ConfFileNames(specs, topology);

  fs::create_directories(a.out_dir);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    WriteFile(fs::path(a.out_dir) / files[i], RenderConf(specs[i]));
  }
  WriteFile(fs::path(a.out_dir) / "manifest.json",
            BuildManifest(specs, topology).dump(2) + "\n");

  err << fmt::format("wrote {} tunnel configs to {}\n", specs.size(), a.out_dir);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const NodeSpec& node = topology.node(specs[i].node_id);
    err << fmt::format("  {} ({}) {} pubkey {}\n", node.name, node.public_address, files[i],
                       EncodeKey(specs[i].keypair.public_key));
  }
  err << "apply: copy each conf to its host as /etc/wireguard/<name>.conf and run "
         "`wg-quick up <name>`\n";
  return kExitOk;
}

int RunSimulate(const TopologyArgs& t, const RequestArgs& r, const std::string& format,
                const std::string& plan_path, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
  const Topology topology = LoadTopologyArg(t);
  const TransferRequest request = MakeRequest(r);
  SimulationReport report = Compare(topology, request, ParseBillingRule(r.rule));
  if (!plan_path.empty()) {
    const Plan plan = ParsePlan(ReadFile(plan_path));
    CheckPlanAgainst(topology, plan);
    ReportRow row = RowForRoute(topology, request, "supplied", plan.path, plan.configs);
    row.note = plan_path;
    report.rows.push_back(std::move(row));
  }
  const std::string table = RenderReportTable(report);
  if (format == "structured") {
    Emit(out_path, ReportToJson(report).dump(2) + "\n", out);
    err << table;
  } else {
    Emit(out_path, table, out);
  }
  return report.rows.front().latency_s ? kExitOk : kExitInfeasible;
}

int RunOracle(const TopologyArgs& t, const RequestArgs& r, double fraction, int max_nodes,
              bool force, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const Topology topology = LoadTopologyArg(t);
  const TransferRequest request = MakeRequest(r);
  ValidateRequest(topology, request);
  const BillingRule rule = ParseBillingRule(r.rule);
  const WeightBuild build = BuildWeights(topology, request, fraction, rule);
  const auto exact = OracleSearch(build.weights, request.source, request.destination,
                                  request.budget_usd, {max_nodes, force});
  const auto heuristic =
      LabelSearch(build.weights, request.source, request.destination, request.budget_usd);
  if (!exact) {
    err << fmt::format("insufficient budget: no path within {} USD at fraction {}\n",
                       request.budget_usd, fraction);
    return kExitInfeasible;
  }
  const Plan plan = MakePlan(build, *exact, fraction, 0);
  Emit(out_path, PlanToJson(plan).dump(2) + "\n", out);
  err << Describe(topology, plan);
  err << (heuristic ? fmt::format("label search at the same fraction: {:.3f} s, {:.4f} USD\n",
                                  heuristic->total_latency, heuristic->total_cost)
                    : std::string("label search at the same fraction: no path\n"));
  return kExitOk;
}

int RunProbe(const TopologyArgs& t, int attempts, const std::string& command,
             const std::string& out_path, std::ostream& out, std::ostream& err) {
  const Topology topology = LoadTopologyArg(t);
  CommandRttProber prober(command);
  if (!prober.Available()) {
    err << fmt::format("error: probe command '{}' is not available on this host\n", command);
    return kExitInputError;
  }
  const ProbeReport report = ProbeRtts(topology, prober, attempts);
  for (const std::string& w : report.warnings) err << "warning: " << w << "\n";
  Emit(out_path, TopologyToJson(report.topology).dump(2) + "\n", out);
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budget-constrained overlay route planner and WireGuard chain generator",
               "sdwan-plan"};
  app.require_subcommand(1);

  TopologyArgs topo;
  RequestArgs req;
  std::string out_path;

  CLI::App* plan_cmd = app.add_subcommand("plan", "Find the fastest path within budget");
  AddTopologyOptions(plan_cmd, topo);
  AddRequestOptions(plan_cmd, req);
  plan_cmd->add_option("--out", out_path, "Write the plan document here instead of stdout");

  RenderArgs render;
  std::uint64_t seed = 0;
  CLI::App* render_cmd =
      app.add_subcommand("render-wg", "Render chained WireGuard configs for a plan");
  AddTopologyOptions(render_cmd, topo);
  render_cmd->add_option("--plan", render.plan, "Plan document")->required();
  render_cmd->add_option("--subnet", render.subnet, "Overlay subnet")->capture_default_str();
  CLI::Option* seed_opt =
      render_cmd->add_option("--seed", seed, "Deterministic key material (testing only)");
  render_cmd->add_option("--base-port", render.base_port, "WireGuard listen port")->capture_default_str()
      ->check(CLI::Range(1, 65535));
  render_cmd->add_option("--keepalive", render.keepalive, "PersistentKeepalive seconds, 0 = off")->capture_default_str();
  render_cmd->add_option("--keys", render.keys, "JSON file of node id -> base64 private key");
  render_cmd->add_option("--out", render.out_dir, "Output directory")->capture_default_str();

  std::string format = "table";
  std::string sim_plan;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Compare planner, naive route and exact optimum");
  AddTopologyOptions(sim_cmd, topo);
  AddRequestOptions(sim_cmd, req);
  sim_cmd->add_option("--format", format, "Output format")->capture_default_str()
      ->check(CLI::IsMember({"table", "structured"}));
  sim_cmd->add_option("--plan", sim_plan, "Also evaluate this plan document");
  sim_cmd->add_option("--out", out_path, "Write the report here instead of stdout");

  double fraction = 1.0;
  int max_nodes = 12;
  bool force = false;
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Exact minimum-latency path within budget (small graphs)");
  AddTopologyOptions(oracle_cmd, topo);
  AddRequestOptions(oracle_cmd, req);
  oracle_cmd->add_option("--fraction", fraction, "Bandwidth fraction for PAYG nodes")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  oracle_cmd->add_option("--max-nodes", max_nodes, "Refuse larger graphs")->capture_default_str();
  oracle_cmd->add_flag("--force", force, "Enumerate even above --max-nodes");
  oracle_cmd->add_option("--out", out_path, "Write the plan document here instead of stdout");

  int attempts = 3;
  std::string probe_cmd_template = CommandRttProber::kDefaultTemplate;
  CLI::App* probe_cmd = app.add_subcommand("probe", "Measure link rtts with ping");
  AddTopologyOptions(probe_cmd, topo);
  probe_cmd->add_option("--attempts", attempts, "Pings per link (median is kept)")->capture_default_str()
      ->check(CLI::PositiveNumber);
  probe_cmd->add_option("--probe-cmd", probe_cmd_template,
                        "Command template; {src}/{dst} expand to public addresses")->capture_default_str();
  probe_cmd->add_option("--out", out_path, "Write the updated topology here instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInputError;
  }

  try {
    if (*plan_cmd) return RunPlan(topo, req, out_path, out, err);
    if (*render_cmd) {
      if (*seed_opt) render.seed = seed;
      return RunRender(topo, render, err);
    }
    if (*sim_cmd) return RunSimulate(topo, req, format, sim_plan, out_path, out, err);
    if (*oracle_cmd) {
      if (!(fraction > 0.0)) throw std::invalid_argument("--fraction must be in (0, 1]");
      return RunOracle(topo, req, fraction, max_nodes, force, out_path, out, err);
    }
    if (*probe_cmd) return RunProbe(topo, attempts, probe_cmd_template, out_path, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace sdwan
