#include "sdwan/planner.hpp"

#include <random>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "sdwan/errors.hpp"
#include "support/cost_model.hpp"
#include "support/generators.hpp"

namespace sdwan {

// Readable parameter names in test listings.
void PrintTo(BillingRule rule, std::ostream* os) { *os << ToString(rule); }

namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

Topology TwoNodes(double rtt_ms = 20.0) {
  return Topology::Create({{0, "src", "192.0.2.1", 100.0, 0.021, 0.081},
                           {1, "dst", "192.0.2.2", 100.0, 0.021, 0.081}},
                          {{0, 1, rtt_ms}}, LinkMode::kUndirected);
}

Topology Testbed() {
  return LoadTopology(std::string(SDWAN_FIXTURE_DIR) + "/testbed6.json", LinkMode::kUndirected);
}

TEST(BuildWeightsTest, SmallTransferIsAllPfdtAtFullBandwidth) {
  const WeightBuild b = BuildWeights(TwoNodes(), {0, 1, 1.0, 10.0}, 1.0, BillingRule::kThreshold);
  for (const NodeBillingConfig& cfg : b.configs) {
    EXPECT_EQ(cfg, (NodeBillingConfig{BillingMethod::kPfdt, 100.0}));
  }
  EXPECT_DOUBLE_EQ(b.weights.cost(0, 1), 0.081);
  EXPECT_DOUBLE_EQ(b.weights.latency(0, 1), 80.01);
}

TEST(BuildWeightsTest, LargeTransferSwitchesToPayg) {
  const WeightBuild b = BuildWeights(TwoNodes(), {0, 1, 30.0, 10.0}, 1.0, BillingRule::kThreshold);
  EXPECT_EQ(b.configs[0], (NodeBillingConfig{BillingMethod::kPayg, 100.0}));
  EXPECT_DOUBLE_EQ(b.weights.cost(0, 1), 2.10);
  EXPECT_DOUBLE_EQ(b.weights.latency(0, 1), 2400.01);
}

TEST(BuildWeightsTest, HalfFractionBillsTwoHours) {
  const WeightBuild b = BuildWeights(TwoNodes(), {0, 1, 30.0, 10.0}, 0.5, BillingRule::kThreshold);
  EXPECT_EQ(b.configs[0], (NodeBillingConfig{BillingMethod::kPayg, 50.0}));
  // 4800 s at 50 Mbps -> 2 hours * 0.021 * 50.
  EXPECT_DOUBLE_EQ(b.weights.cost(0, 1), 2.10);
  EXPECT_DOUBLE_EQ(b.weights.latency(0, 1), 4800.01);
}

TEST(BuildWeightsTest, RejectsFractionOutsideUnitInterval) {
  EXPECT_THROW(BuildWeights(TwoNodes(), {0, 1, 1.0, 1.0}, 0.0, BillingRule::kThreshold),
               std::invalid_argument);
  EXPECT_THROW(BuildWeights(TwoNodes(), {0, 1, 1.0, 1.0}, 1.01, BillingRule::kThreshold),
               std::invalid_argument);
}

TEST(DiscoverPathTest, FullBandwidthFastPath) {
  const Discovery d = DiscoverPathTraced(Testbed(), {0, 5, 1.0, 0.5, 10});
  ASSERT_TRUE(d.plan);
  EXPECT_THAT(d.plan->path, ElementsAre(0, 1, 5));
  EXPECT_EQ(d.plan->fraction_k, 1.0);
  EXPECT_EQ(d.plan->iterations_used, 0);
  EXPECT_TRUE(d.steps.empty());
  EXPECT_THAT(d.fractions_tried, ElementsAre(1.0));
  // Two PFDT senders at 0.081 and two hops of 80 s plus half of 28 and 205 ms.
  EXPECT_DOUBLE_EQ(d.plan->predicted_cost_usd, 0.162);
  EXPECT_NEAR(d.plan->predicted_latency_s, 160.1165, 1e-9);
  EXPECT_EQ(d.plan->config(1), (NodeBillingConfig{BillingMethod::kPfdt, 100.0}));
  EXPECT_EQ(d.plan->config(5).method, BillingMethod::kNone);
}

TEST(DiscoverPathTest, ZeroBudgetIsInsufficient) {
  const Discovery d = DiscoverPathTraced(Testbed(), {0, 5, 1.0, 0.0, 10});
  EXPECT_FALSE(d.plan);
  EXPECT_EQ(d.steps.size(), 10u);
}

TEST(DiscoverPathTest, ZeroIterationsOnlyTriesFullBandwidth) {
  const Discovery d = DiscoverPathTraced(TwoNodes(), {0, 1, 30.0, 1.6, 0});
  EXPECT_FALSE(d.plan);
  EXPECT_THAT(d.fractions_tried, ElementsAre(1.0));
}

// PAYG on the single sender never drops below 0.021 * 66.7 Mbps-hours = 1.40
// and PFDT costs 2.43, so 1.20 buys nothing at any fraction.
TEST(DiscoverPathTest, BudgetBelowEveryFractionIsAbsence) {
  const Discovery d = DiscoverPathTraced(TwoNodes(), {0, 1, 30.0, 1.20, 12});
  EXPECT_FALSE(d.plan);
  EXPECT_EQ(d.steps.size(), 12u);
  for (const BracketStep& s : d.steps) EXPECT_FALSE(s.success);
  EXPECT_DOUBLE_EQ(d.steps.back().next_k, 0.5 / 4096);
}

// Replayed by hand: tried 0.5 f, 0.25 s, 0.375 s, 0.4375 f, 0.40625 f,
// 0.390625 f, 0.3828125 f, 0.37890625 s, 0.380859375 s, then three failures.
TEST(DiscoverPathTest, BisectionConvergesOnLastAffordableFraction) {
  const Discovery d = DiscoverPathTraced(TwoNodes(), {0, 1, 30.0, 1.60, 12});
  ASSERT_TRUE(d.plan);
  EXPECT_EQ(d.plan->fraction_k, 0.380859375);
  EXPECT_EQ(d.plan->iterations_used, 12);
  EXPECT_EQ(d.plan->config(0), (NodeBillingConfig{BillingMethod::kPayg, 38.0859375}));
  EXPECT_DOUBLE_EQ(d.plan->predicted_cost_usd, 1.599609375);
  ASSERT_EQ(d.steps.size(), 12u);
  std::vector<double> tried;
  std::vector<bool> success;
  for (const BracketStep& s : d.steps) {
    tried.push_back(s.tried_k);
    success.push_back(s.success);
  }
  EXPECT_THAT(tried, ElementsAre(0.5, 0.25, 0.375, 0.4375, 0.40625, 0.390625, 0.3828125,
                                 0.37890625, 0.380859375, 0.3818359375, 0.38134765625,
                                 0.381103515625));
  EXPECT_THAT(success, ElementsAre(false, true, true, false, false, false, false, true, true,
                                   false, false, false));
}

TEST(DiscoverPathTest, BracketContracts) {
  const Discovery d = DiscoverPathTraced(TwoNodes(), {0, 1, 30.0, 1.60, 12});
  double width = 1.0;
  for (const BracketStep& s : d.steps) {
    EXPECT_LT(s.k_lower, s.k_upper);
    EXPECT_GT(s.next_k, s.k_lower);
    EXPECT_LT(s.next_k, s.k_upper);
    EXPECT_DOUBLE_EQ(s.k_upper - s.k_lower, width / 2.0);
    width = s.k_upper - s.k_lower;
  }
}

TEST(DiscoverPathTest, RejectsBadRequests) {
  EXPECT_THROW(DiscoverPath(TwoNodes(), {0, 9, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(DiscoverPath(TwoNodes(), {0, 1, 0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(DiscoverPath(TwoNodes(), {0, 1, 1.0, -1.0}), std::invalid_argument);
  EXPECT_THROW(DiscoverPath(TwoNodes(), {0, 1, 1.0, 1.0, -1}), std::invalid_argument);
}

TEST(PlanJsonTest, RoundTrip) {
  const Plan plan = *DiscoverPath(TwoNodes(), {0, 1, 30.0, 1.60, 12});
  EXPECT_EQ(ParsePlan(PlanToJson(plan).dump()), plan);
  EXPECT_EQ(PlanToJson(plan)["per_node"]["0"]["method"], "payg");
}

TEST(PlanJsonTest, RejectsMalformedPlans) {
  auto error_of = [](const std::string& text) {
    try {
      ParsePlan(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string tail =
      R"("predicted_cost_usd": 1, "predicted_latency_s": 1, "fraction_k": 1, "iterations_used": 0)";
  EXPECT_THAT(error_of("[1"), HasSubstr("parse error"));
  EXPECT_THAT(error_of(R"({"path": [0, 1], "per_node": {}, )" + tail + "}"),
              HasSubstr("path node 0 has no billing config"));
  EXPECT_THAT(error_of(R"({"path": [0, 1], "per_node": {"0": {"method": "pfdt",
      "bandwidth_mbps": 5}, "1": {"method": "pfdt", "bandwidth_mbps": 5}}, )" + tail + "}"),
              HasSubstr("node 1 is billed but does not send"));
  EXPECT_THAT(error_of(R"({"path": [0, 1], "per_node": {"0": {"method": "flat",
      "bandwidth_mbps": 5}}, )" + tail + "}"),
              HasSubstr("unknown method 'flat'"));
  EXPECT_THAT(error_of(R"({"path": [0, 1], "per_node": {"0": {"method": "pfdt",
      "bandwidth_mbps": 5}}, "extra": 0, )" + tail + "}"),
              HasSubstr("unknown key 'extra'"));
}

TEST(PlanJsonTest, CheckAgainstTopology) {
  Plan plan = *DiscoverPath(TwoNodes(), {0, 1, 1.0, 1.0});
  EXPECT_NO_THROW(CheckPlanAgainst(TwoNodes(), plan));
  plan.configs[0].bandwidth_mbps = 150.0;
  EXPECT_THROW(CheckPlanAgainst(TwoNodes(), plan), InputError);
  plan = *DiscoverPath(Testbed(), {0, 5, 1.0, 0.5});
  plan.path = {0, 5};
  plan.configs = {{0, {BillingMethod::kPfdt, 100.0}}};
  EXPECT_THROW(CheckPlanAgainst(Testbed(), plan), InputError);
}

class PlannerPropertyTest : public ::testing::TestWithParam<BillingRule> {
 protected:
  std::mt19937_64 rng_{4242};
};

TEST_P(PlannerPropertyTest, PlansAreWithinBudgetAndSelfConsistent) {
  int plans = 0;
  for (int i = 0; i < 400; ++i) {
    const Topology t = testing::MakeRandomTopology(rng_);
    const TransferRequest req = testing::MakeRandomRequest(rng_, t);
    const auto plan = DiscoverPath(t, req, GetParam());
    if (!plan) continue;
    ++plans;
    EXPECT_EQ(plan->path.front(), req.source);
    EXPECT_EQ(plan->path.back(), req.destination);
    EXPECT_NO_THROW(CheckPlanAgainst(t, *plan));
    EXPECT_LE(plan->predicted_cost_usd, req.budget_usd);
    const testing::Recomputed r = testing::RecomputePlan(t, plan->path, plan->configs, req.data_gb);
    EXPECT_NEAR(r.cost_usd, plan->predicted_cost_usd, 1e-9);
    EXPECT_NEAR(r.latency_s, plan->predicted_latency_s, 1e-9 * r.latency_s + 1e-9);
    for (const auto& [id, cfg] : plan->configs) {
      const double cap = t.node(id).max_egress_mbps;
      if (cfg.method == BillingMethod::kPfdt) {
        EXPECT_EQ(cfg.bandwidth_mbps, cap);
      } else {
        EXPECT_DOUBLE_EQ(cfg.bandwidth_mbps, plan->fraction_k * cap);
      }
    }
  }
  EXPECT_GT(plans, 50);
}

TEST_P(PlannerPropertyTest, FastPathMatchesDirectSearch) {
  for (int i = 0; i < 300; ++i) {
    const Topology t = testing::MakeRandomTopology(rng_);
    const TransferRequest req = testing::MakeRandomRequest(rng_, t);
    const WeightBuild full = BuildWeights(t, req, 1.0, GetParam());
    const auto direct = LabelSearch(full.weights, req.source, req.destination, req.budget_usd);
    const auto plan = DiscoverPath(t, req, GetParam());
    if (direct) {
      ASSERT_TRUE(plan);
      EXPECT_EQ(*plan, MakePlan(full, *direct, 1.0, 0));
    } else if (plan) {
      EXPECT_LT(plan->fraction_k, 1.0);
      EXPECT_EQ(plan->iterations_used, req.max_iterations);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Rules, PlannerPropertyTest,
                         ::testing::Values(BillingRule::kThreshold, BillingRule::kExactCost),
                         [](const auto& info) {
                           return info.param == BillingRule::kThreshold ? "Threshold"
                                                                        : "ExactCost";
                         });

// With only PFDT available every sender runs at its cap, so the fastest path's
// latency is a minimum of functions increasing in the payload size.
TEST(PlannerMonotonicityTest, PfdtOnlyLatencyGrowsWithData) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Topology base = testing::MakeRandomTopology(rng);
    std::vector<NodeSpec> nodes = base.nodes();
    for (NodeSpec& n : nodes) {
      n.payg_usd_per_mbps_hour.reset();
      n.pfdt_usd_per_gb = 0.05;
    }
    const Topology t = Topology::Create(nodes, base.links(), LinkMode::kUndirected);
    std::uniform_int_distribution<int> node(0, t.size() - 1);
    const int s = node(rng), d = node(rng);
    double previous = -1.0;
    for (double data : {0.1, 0.5, 2.0, 10.0, 40.0}) {
      const auto plan = DiscoverPath(t, {s, d, data, 1e9, 4});
      if (!plan) break;
      EXPECT_GE(plan->predicted_latency_s, previous);
      previous = plan->predicted_latency_s;
    }
  }
}

}  // namespace
}  // namespace sdwan
