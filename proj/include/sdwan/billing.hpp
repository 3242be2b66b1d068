#pragma once

#include <limits>
#include <string_view>

#include "sdwan/topology.hpp"

namespace sdwan {

// Units: bandwidth in Mbps (10^6 bit/s), data in GB (10^9 bytes), time in
// seconds, money in USD.

enum class BillingMethod { kNone = 0, kPayg = 1, kPfdt = 2 };

std::string_view ToString(BillingMethod method);
BillingMethod ParseBillingMethod(std::string_view text);

// Egress configuration of one node. PFDT always runs at the node's full
// egress cap; PAYG runs at the purchased bandwidth.
struct NodeBillingConfig {
  BillingMethod method = BillingMethod::kNone;
  double bandwidth_mbps = 0.0;

  bool operator==(const NodeBillingConfig&) const = default;
};

// How a node picks between PAYG and PFDT for a candidate bandwidth.
//   kThreshold: PFDT iff data < (payg * bandwidth) / pfdt, i.e. assumes one
//               billed hour.
//   kExactCost: PFDT unless PAYG's real (hour-rounded) cost is strictly lower.
enum class BillingRule { kThreshold, kExactCost };

std::string_view ToString(BillingRule rule);
BillingRule ParseBillingRule(std::string_view text);

inline constexpr double kSecondsPerHour = 3600.0;

double TransmissionSeconds(double data_gb, double bandwidth_mbps);

// Propagation (rtt / 2) plus transmission of the whole payload.
double EdgeLatency(double rtt_s, double data_gb, double bandwidth_mbps);

double PfdtCost(double pfdt_usd_per_gb, double data_gb);

// Whole hours billed for sending `data_gb` at `bandwidth_mbps`; at least one.
int BilledHours(double data_gb, double bandwidth_mbps);

double PaygCost(double payg_usd_per_mbps_hour, double bandwidth_mbps, double data_gb);

// Data size at which one hour of PAYG costs the same as PFDT. +infinity when
// PFDT is free.
double DataThreshold(double payg_usd_per_mbps_hour, double pfdt_usd_per_gb,
                     double bandwidth_mbps);

// Requires 0 < candidate_mbps <= node.max_egress_mbps.
NodeBillingConfig SelectBilling(const NodeSpec& node, double candidate_mbps, double data_gb,
                                BillingRule rule);

// Egress cost of `node` sending `data_gb` under `config`. Throws
// std::invalid_argument for kNone or a method the node has no rate for.
double NodeCost(const NodeSpec& node, const NodeBillingConfig& config, double data_gb);

}  // namespace sdwan
