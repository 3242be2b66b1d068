#include "sdwan/billing.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace sdwan {

std::string_view ToString(BillingMethod method) {
  switch (method) {
    case BillingMethod::kNone:
      return "none";
    case BillingMethod::kPayg:
      return "payg";
    case BillingMethod::kPfdt:
      return "pfdt";
  }
  return "?";
}

BillingMethod ParseBillingMethod(std::string_view text) {
  if (text == "none") return BillingMethod::kNone;
  if (text == "payg") return BillingMethod::kPayg;
  if (text == "pfdt") return BillingMethod::kPfdt;
  throw std::invalid_argument(fmt::format("unknown billing method '{}'", text));
}

std::string_view ToString(BillingRule rule) {
  return rule == BillingRule::kThreshold ? "threshold" : "exact-cost";
}

BillingRule ParseBillingRule(std::string_view text) {
  if (text == "threshold") return BillingRule::kThreshold;
  if (text == "exact-cost") return BillingRule::kExactCost;
  throw std::invalid_argument(fmt::format("unknown billing rule '{}'", text));
}

double TransmissionSeconds(double data_gb, double bandwidth_mbps) {
  if (!(bandwidth_mbps > 0.0)) {
    throw std::domain_error(fmt::format("bandwidth must be positive, got {}", bandwidth_mbps));
  }
  if (!(data_gb >= 0.0)) throw std::domain_error("data size must be non-negative");
  // GB -> bits is 8e9, Mbps -> bit/s is 1e6.
  return data_gb * 8000.0 / bandwidth_mbps;
}

double EdgeLatency(double rtt_s, double data_gb, double bandwidth_mbps) {
  if (!(rtt_s >= 0.0)) throw std::domain_error("rtt must be non-negative");
  return rtt_s / 2.0 + TransmissionSeconds(data_gb, bandwidth_mbps);
}

double PfdtCost(double pfdt_usd_per_gb, double data_gb) { return pfdt_usd_per_gb * data_gb; }

int BilledHours(double data_gb, double bandwidth_mbps) {
  const double hours = std::ceil(TransmissionSeconds(data_gb, bandwidth_mbps) / kSecondsPerHour);
  return hours < 1.0 ? 1 : static_cast<int>(hours);
}

double PaygCost(double payg_usd_per_mbps_hour, double bandwidth_mbps, double data_gb) {
  return payg_usd_per_mbps_hour * bandwidth_mbps * BilledHours(data_gb, bandwidth_mbps);
}

double DataThreshold(double payg_usd_per_mbps_hour, double pfdt_usd_per_gb,
                     double bandwidth_mbps) {
  if (pfdt_usd_per_gb == 0.0) return std::numeric_limits<double>::infinity();
  return payg_usd_per_mbps_hour * bandwidth_mbps / pfdt_usd_per_gb;
}

NodeBillingConfig SelectBilling(const NodeSpec& node, double candidate_mbps, double data_gb,
                                BillingRule rule) {
  if (!(candidate_mbps > 0.0) || candidate_mbps > node.max_egress_mbps) {
    throw std::invalid_argument(fmt::format("node {}: candidate bandwidth {} outside (0, {}]",
                                            node.id, candidate_mbps, node.max_egress_mbps));
  }
  const NodeBillingConfig pfdt{BillingMethod::kPfdt, node.max_egress_mbps};
  const NodeBillingConfig payg{BillingMethod::kPayg, candidate_mbps};
  if (!node.pfdt_usd_per_gb) return payg;
  if (!node.payg_usd_per_mbps_hour) return pfdt;

  const double k1 = *node.payg_usd_per_mbps_hour;
  const double k2 = *node.pfdt_usd_per_gb;
  if (rule == BillingRule::kThreshold) {
    return data_gb < DataThreshold(k1, k2, candidate_mbps) ? pfdt : payg;
  }
  return PaygCost(k1, candidate_mbps, data_gb) < PfdtCost(k2, data_gb) ? payg : pfdt;
}

double NodeCost(const NodeSpec& node, const NodeBillingConfig& config, double data_gb) {
  switch (config.method) {
    case BillingMethod::kPfdt:
      if (!node.pfdt_usd_per_gb) {
        throw std::invalid_argument(fmt::format("node {} has no PFDT rate", node.id));
      }
      return PfdtCost(*node.pfdt_usd_per_gb, data_gb);
    case BillingMethod::kPayg:
      if (!node.payg_usd_per_mbps_hour) {
        throw std::invalid_argument(fmt::format("node {} has no PAYG rate", node.id));
      }
      return PaygCost(*node.payg_usd_per_mbps_hour, config.bandwidth_mbps, data_gb);
    case BillingMethod::kNone:
      break;
  }
  throw std::invalid_argument(fmt::format("node {} has no billing method", node.id));
}

}  // namespace sdwan
