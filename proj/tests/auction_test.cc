// Copyright 2026 The sfpa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sfpa/auction.h"

#include <cmath>

#include <gtest/gtest.h>

#include "sfpa/closed_form.h"
#include "test_util.h"

namespace sfpa {
namespace {

std::vector<Valuation> SingleItem(double a, double b) {
  return {Valuation::Additive({a}), Valuation::Additive({b})};
}

TEST(AllocateTest, StrictMaximumWins) {
  const BidProfile bids = BidProfile::FromRows({{1.0}, {2.0}});
  EXPECT_EQ(Allocate(bids, PriorityRule::ByIndex(2, 1)).owner[0], 1);
}

TEST(AllocateTest, PriorityBreaksTies) {
  const BidProfile bids = BidProfile::FromRows({{1.0}, {1.0}});
  EXPECT_EQ(Allocate(bids, PriorityRule::Global(2, 1, {1, 0})).owner[0], 1);
  EXPECT_EQ(Allocate(bids, PriorityRule::ByIndex(2, 1)).owner[0], 0);
}

TEST(AllocateTest, TieToleranceIsOneTrillionth) {
  const BidProfile near = BidProfile::FromRows({{1.0}, {1.0 + 5e-13}});
  EXPECT_EQ(Allocate(near, PriorityRule::ByIndex(2, 1)).owner[0], 0);
  const BidProfile far = BidProfile::FromRows({{1.0}, {1.0 + 1e-11}});
  EXPECT_EQ(Allocate(far, PriorityRule::ByIndex(2, 1)).owner[0], 1);
}

TEST(AllocateTest, RandomizedRuleSplitsTies) {
  const TieBreakingRule rule = TieBreakingRule::Randomized(
      {{0.5, PriorityRule::ByIndex(2, 1)}, {0.5, PriorityRule::Global(2, 1, {1, 0})}});
  const auto branches = Allocate(BidProfile::FromRows({{1.0}, {1.0}}), rule);
  ASSERT_EQ(branches.size(), 2u);
  EXPECT_EQ(branches[0].probability, 0.5);
  EXPECT_EQ(branches[0].allocation.owner[0], 0);
  EXPECT_EQ(branches[1].probability, 0.5);
  EXPECT_EQ(branches[1].allocation.owner[0], 1);
}

TEST(AllocateTest, RandomizedRuleRejectsBadMixtures) {
  EXPECT_THROW(TieBreakingRule::Randomized({{0.4, PriorityRule::ByIndex(2, 1)},
                                            {0.5, PriorityRule::ByIndex(2, 1)}}),
               Error);
  EXPECT_THROW(PriorityRule(2, {{0, 0}}), Error);
}

TEST(OutcomeTest, SingleItemOutbid) {
  const auto vals = SingleItem(1.0, 2.0);
  const Outcome o = ComputeOutcome(vals, BidProfile::FromRows({{1.0}, {1.01}}),
                                   TieBreakingRule::ByIndex(2, 1));
  EXPECT_NEAR(o.utilities[0], 0.0, 1e-12);
  EXPECT_NEAR(o.utilities[1], 0.99, 1e-12);
  EXPECT_NEAR(o.welfare, 2.0, 1e-12);
  EXPECT_NEAR(o.revenue, 1.01, 1e-12);
}

TEST(OutcomeTest, AllZeroBidsGoToFirstPriority) {
  const std::vector<Valuation> vals = {Valuation::Additive({0.5, 0.25}),
                                       Valuation::Additive({1.0, 1.0})};
  const Outcome o = ComputeOutcome(vals, BidProfile(2, 2), TieBreakingRule::ByIndex(2, 2));
  EXPECT_EQ(o.branches[0].allocation.owner, (std::vector<int>{0, 0}));
  EXPECT_EQ(o.welfare, 0.75);
  EXPECT_EQ(o.revenue, 0.0);
}

TEST(OutcomeTest, AndOrHandSimulation) {
  const double v = 0.8;
  const std::vector<Valuation> vals = {Valuation::And(2, 1.0), Valuation::Or(2, v)};
  const Outcome o = ComputeOutcome(vals, BidProfile::FromRows({{0.2, 0.2}, {0.3, 0.0}}),
                                   TieBreakingRule::ByIndex(2, 2));
  EXPECT_EQ(o.branches[0].allocation.owner, (std::vector<int>{1, 0}));
  EXPECT_NEAR(o.utilities[0], -0.2, 1e-12);
  EXPECT_NEAR(o.utilities[1], v - 0.3, 1e-12);
}

TEST(OutcomeTest, RandomizedOutcomeIsProbabilityWeighted) {
  const auto vals = SingleItem(1.0, 2.0);
  const TieBreakingRule rule = TieBreakingRule::Randomized(
      {{0.25, PriorityRule::ByIndex(2, 1)}, {0.75, PriorityRule::Global(2, 1, {1, 0})}});
  const Outcome o = ComputeOutcome(vals, BidProfile::FromRows({{0.5}, {0.5}}), rule);
  EXPECT_NEAR(o.utilities[0], 0.25 * 0.5, 1e-12);
  EXPECT_NEAR(o.utilities[1], 0.75 * 1.5, 1e-12);
  EXPECT_NEAR(o.welfare, 0.25 * 1 + 0.75 * 2, 1e-12);
  double total = 0.0;
  for (const auto& b : o.branches) total += b.probability;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(OutcomeTest, RevenuePlusUtilitiesIsWelfare) {
  Rng rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + static_cast<int>(rng.Below(3));
    const int m = 1 + static_cast<int>(rng.Below(4));
    std::vector<Valuation> vals;
    for (int i = 0; i < n; ++i) vals.push_back(testing::RandomMonotone(m, rng));
    BidProfile bids(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) bids.at(i, j) = 0.25 * static_cast<double>(rng.Below(5));
    }
    const Outcome o = ComputeOutcome(vals, bids, TieBreakingRule::ByIndex(n, m));
    Money u = 0.0;
    for (Money x : o.utilities) u += x;
    EXPECT_NEAR(o.revenue + u, o.welfare, 1e-12);
    EXPECT_LE(o.welfare, OptimalWelfare(vals).value + 1e-12);
    // Allocation is a partition: every item has exactly one owner in range.
    for (int owner : o.branches[0].allocation.owner) {
      EXPECT_GE(owner, 0);
      EXPECT_LT(owner, n);
    }
  }
}

TEST(OutcomeTest, PlayerUtilityMatchesOutcome) {
  Rng rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 3;
    const int m = 3;
    std::vector<Valuation> vals;
    for (int i = 0; i < n; ++i) vals.push_back(testing::RandomMonotone(m, rng));
    BidProfile bids(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) bids.at(i, j) = 0.5 * static_cast<double>(rng.Below(3));
    }
    const PriorityRule rule = PriorityRule::Global(n, m, {2, 0, 1});
    const Outcome o = ComputeOutcome(vals, bids, rule);
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(PlayerUtility(vals[i], bids, i, rule), o.utilities[i]);
    }
  }
}

TEST(BidProfileTest, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(BidProfile::FromRows({{-0.1}}).Validate(), Error);
  EXPECT_THROW(BidProfile::FromRows({{NAN}}).Validate(), Error);
}

TEST(OptimalWelfareTest, AndOrOptimumIsOne) {
  const std::vector<Valuation> vals = {Valuation::And(2, 1.0),
                                       Valuation::Or(2, 1.0 / std::sqrt(2.0))};
  const WelfareOptimum opt = OptimalWelfare(vals);
  EXPECT_NEAR(opt.value, 1.0, 1e-12);
  EXPECT_EQ(opt.allocation.owner, (std::vector<int>{0, 0}));
}

TEST(OptimalWelfareTest, GridGameOptimumIsLSquared) {
  for (int l = 2; l <= 4; ++l) {
    const auto vals = GridInstance(l).Valuations();
    EXPECT_NEAR(OptimalWelfare(vals).value, l * l, 1e-12) << l;
  }
}

TEST(OptimalWelfareTest, TriangleOptimumIsOne) {
  EXPECT_NEAR(OptimalWelfare(TriangleInstance().Valuations()).value, 1.0, 1e-12);
}

// The reduced search must agree with plain n^m enumeration.
TEST(OptimalWelfareTest, MatchesFullEnumeration) {
  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(rng.Below(3));
    const int m = 1 + static_cast<int>(rng.Below(4));
    std::vector<Valuation> vals;
    for (int i = 0; i < n; ++i) {
      vals.push_back(rng.Below(3) == 0
                         ? Valuation::SingleMinded(m, ItemSet(static_cast<uint32_t>(rng.Below(1u << m))), 1.0)
                         : testing::RandomMonotone(m, rng));
    }
    Money best = 0.0;
    std::vector<int> owner(m, 0);
    while (true) {
      best = std::max(best, Welfare(vals, Allocation{owner}));
      int j = m - 1;
      while (j >= 0 && ++owner[j] == n) owner[j--] = 0;
      if (j < 0) break;
    }
    const WelfareOptimum opt = OptimalWelfare(vals);
    EXPECT_NEAR(opt.value, best, 1e-12);
    EXPECT_NEAR(Welfare(vals, opt.allocation), opt.value, 1e-12);
  }
}

}  // namespace
}  // namespace sfpa
