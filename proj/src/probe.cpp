#include "sdwan/probe.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace sdwan {
namespace {

std::string ReplaceAll(std::string s, std::string_view from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

// Single-quote for /bin/sh.
std::string ShellQuote(const std::string& s) {
  return "'" + ReplaceAll(s, "'", "'\\''") + "'";
}

bool ExecutableOnPath(const std::string& name) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (name.find('/') != std::string::npos) return fs::exists(name, ec);
  const char* path = std::getenv("PATH");
  if (path == nullptr) return false;
  std::stringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (!dir.empty() && fs::exists(fs::path(dir) / name, ec)) return true;
  }
  return false;
}

}  // namespace

CommandRttProber::CommandRttProber(std::string command_template)
    : template_(std::move(command_template)) {}

bool CommandRttProber::Available() const {
  std::istringstream words(template_);
  std::string first;
  words >> first;
  return !first.empty() && ExecutableOnPath(first);
}

std::optional<double> CommandRttProber::MeasureMs(const NodeSpec& from, const NodeSpec& to) {
  std::string cmd = ReplaceAll(template_, "{src}", ShellQuote(from.public_address));
  cmd = ReplaceAll(std::move(cmd), "{dst}", ShellQuote(to.public_address)) + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return std::nullopt;
  std::string output;
  std::array<char, 512> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe.get()) != nullptr) output += buf.data();
  return ParsePingTimeMs(output);
}

std::optional<double> ParsePingTimeMs(const std::string& output) {
  static const std::regex kTime(R"(time[=<]\s*([0-9]+(?:\.[0-9]+)?)\s*ms)");
  std::smatch m;
  if (!std::regex_search(output, m, kTime)) return std::nullopt;
  return std::stod(m[1].str());
}

double Median(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("Median of empty sample set");
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  if (samples.size() % 2 == 1) return samples[mid];
  return (samples[mid - 1] + samples[mid]) / 2.0;
}

ProbeReport ProbeRtts(const Topology& topology, RttProber& prober, int attempts) {
  if (attempts <= 0) throw std::invalid_argument("attempts must be positive");
  const auto& links = topology.links();

  // Links that share a measurement: in undirected mode (a,b) and (b,a).
  std::map<std::pair<int, int>, std::size_t> job_of_pair;
  std::vector<std::size_t> job_of_link(links.size());
  std::vector<std::size_t> job_link;
  for (std::size_t i = 0; i < links.size(); ++i) {
    std::pair<int, int> key{links[i].src, links[i].dst};
    if (topology.mode() == LinkMode::kUndirected && key.first > key.second) {
      std::swap(key.first, key.second);
    }
    auto [it, inserted] = job_of_pair.emplace(key, job_link.size());
    if (inserted) job_link.push_back(i);
    job_of_link[i] = it->second;
  }

  std::vector<std::future<std::optional<double>>> jobs;
  jobs.reserve(job_link.size());
  for (std::size_t link_index : job_link) {
    const LinkSpec& l = links[link_index];
    jobs.push_back(std::async(std::launch::async, [&prober, &topology, l, attempts] {
      std::vector<double> samples;
      for (int a = 0; a < attempts; ++a) {
        if (auto ms = prober.MeasureMs(topology.node(l.src), topology.node(l.dst))) {
          samples.push_back(*ms);
        }
      }
      return samples.empty() ? std::nullopt : std::optional<double>(Median(samples));
    }));
  }

  std::vector<std::optional<double>> measured;
  for (auto& job : jobs) measured.push_back(job.get());

  ProbeReport report{topology, {}};
  std::vector<double> rtts;
  rtts.reserve(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& m = measured[job_of_link[i]];
    rtts.push_back(m ? *m : links[i].rtt_ms);
    if (!m && job_link[job_of_link[i]] == i) {
      const LinkSpec& l = links[i];
      report.warnings.push_back(fmt::format(
          "link {} -> {} ({} -> {}): unreachable after {} attempts, keeping rtt {} ms", l.src,
          l.dst, topology.node(l.src).public_address, topology.node(l.dst).public_address,
          attempts, l.rtt_ms));
    }
  }
  report.topology = topology.WithRtts(rtts);
  return report;
}

}  // namespace sdwan
