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

#include "sfpa/equilibrium.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace sfpa {
namespace {

std::vector<Valuation> SingleItem(Money a, Money b) {
  return {Valuation::Additive({a}), Valuation::Additive({b})};
}

Game SingleItemGame(Money a, Money b, std::vector<int> order) {
  Game g;
  g.valuations = SingleItem(a, b);
  g.rule = PriorityRule::Global(2, 1, order);
  return g;
}

std::vector<Valuation> AndOrVals(int m, Money v) {
  return {Valuation::And(m, 1.0), Valuation::Or(m, v)};
}

bool ContainsProfile(const std::vector<BidProfile>& list, const BidProfile& p) {
  for (const BidProfile& q : list) {
    bool same = true;
    for (size_t k = 0; k < p.data().size(); ++k) {
      same = same && std::abs(p.data()[k] - q.data()[k]) < 1e-9;
    }
    if (same) return true;
  }
  return false;
}

TEST(DemandTest, PicksUtilityMaximizer) {
  const Valuation v = Valuation::Table(2, {0, 1, 1, 3});
  Money u = 0;
  EXPECT_EQ(Demand(v, std::vector<Money>{0.5, 0.5}, &u), ItemSet::Full(2));
  EXPECT_DOUBLE_EQ(u, 2.0);
  EXPECT_EQ(Demand(v, std::vector<Money>{5, 5}), ItemSet());
}

TEST(WalrasianTest, SingleItemCheck) {
  const auto vals = SingleItem(1, 2);
  const WalrasianEquilibrium we{{{1}}, {1.5}};
  EXPECT_FALSE(WalrasianCheck(vals, we).has_value());
  const WalrasianEquilibrium low{{{1}}, {0.5}};
  const auto w = WalrasianCheck(vals, low);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->player, 0);
  EXPECT_NEAR(w->gain, 0.5, 1e-12);
}

TEST(WalrasianTest, SingleItemSearchPriceInRange) {
  const auto we = WalrasianSearch(SingleItem(1, 2));
  ASSERT_TRUE(we.has_value());
  EXPECT_EQ(we->allocation.owner, std::vector<int>{1});
  EXPECT_GE(we->prices[0], 1.0 - 1e-9);
  EXPECT_LE(we->prices[0], 2.0 + 1e-9);
  EXPECT_NEAR(we->prices[0], 1.0, 1e-9);  // smallest supporting price
}

TEST(WalrasianTest, AndOrLowValueSupported) {
  for (double v : {0.25, 0.4, 0.5}) {
    const auto vals = AndOrVals(2, v);
    const WalrasianEquilibrium we{{{0, 0}}, {v, v}};
    EXPECT_FALSE(WalrasianCheck(vals, we).has_value()) << v;
    EXPECT_TRUE(WalrasianSearch(vals).has_value()) << v;
  }
}

TEST(WalrasianTest, AndOrHighValueHasWitness) {
  for (double v : {0.6, 0.75, 1.0}) {
    const auto vals = AndOrVals(2, v);
    for (double p = 0.0; p <= 1.0; p += 0.05) {
      for (double q = 0.0; q <= 1.0; q += 0.05) {
        for (std::vector<int> owner : {std::vector<int>{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
          EXPECT_TRUE(WalrasianCheck(vals, {{owner}, {p, q}}).has_value());
        }
      }
    }
    EXPECT_FALSE(WalrasianSearch(vals).has_value()) << v;
  }
}

TEST(WalrasianTest, TriangleHasNone) {
  EXPECT_FALSE(WalrasianSearch(TriangleInstance().Valuations()).has_value());
}

TEST(WalrasianTest, GridGameAllPricesOne) {
  const auto vals = GridInstance(3).Valuations();
  const auto we = WalrasianSearch(vals);
  ASSERT_TRUE(we.has_value());
  for (Money p : we->prices) EXPECT_NEAR(p, 1.0, 1e-9);
  EXPECT_NEAR(Welfare(vals, we->allocation), 9.0, 1e-12);
  EXPECT_FALSE(WalrasianCheck(vals, *we).has_value());
}

TEST(WalrasianTest, FoundEquilibriaAreOptimalAndPass) {
  Rng rng(31);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 2 + static_cast<int>(rng.Below(2));
    const int m = 1 + static_cast<int>(rng.Below(3));
    std::vector<Valuation> vals;
    for (int i = 0; i < n; ++i) vals.push_back(testing::RandomMonotone(m, rng));
    const auto we = WalrasianSearch(vals);
    if (!we) continue;
    EXPECT_FALSE(WalrasianCheck(vals, *we).has_value());
    EXPECT_EQ(Welfare(vals, we->allocation), OptimalWelfare(vals).value);
    for (Money p : we->prices) EXPECT_GE(p, 0.0);
  }
}

TEST(WalrasianTest, AdditiveAlwaysSupported) {
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<Valuation> vals;
    for (int i = 0; i < 3; ++i) vals.push_back(Valuation::Additive(testing::RandomWeights(3, rng)));
    EXPECT_TRUE(WalrasianSearch(vals).has_value());
  }
}

TEST(PureNashTest, FavorSecondPlayerHasExactEquilibrium) {
  const Game g = SingleItemGame(1, 2, {1, 0});
  BidGrid grid;
  grid.step = 0.1;
  grid.max = 2.0;
  const PureNashResult r = PureNashSearch(g, grid, 0.0);
  EXPECT_TRUE(ContainsProfile(r.equilibria, BidProfile::FromRows({{1.0}, {1.0}})));
  EXPECT_EQ(r.profiles_examined, 21 * 21);
}

TEST(PureNashTest, FavorFirstPlayerOnlyApproximate) {
  const Game g = SingleItemGame(1, 2, {0, 1});
  BidGrid grid;
  grid.step = 0.1;
  grid.max = 2.0;
  const PureNashResult r = PureNashSearch(g, grid, grid.step);
  ASSERT_FALSE(r.equilibria.empty());
  bool near = false;
  for (const BidProfile& p : r.equilibria) {
    near = near || (std::abs(p.at(0, 0) - 1.0) <= 0.1 + 1e-9 &&
                     std::abs(p.at(1, 0) - 1.0) <= 0.1 + 1e-9);
    // No exact equilibrium exists once deviations are continuous.
    const Money gain = std::max(ContinuumBestDeviation(g, p, 0).gain(),
                                ContinuumBestDeviation(g, p, 1).gain());
    EXPECT_GT(gain, 0.0);
  }
  EXPECT_TRUE(near);
}

TEST(PureNashTest, AndOrBidValueEquilibrium) {
  Game g;
  g.valuations = AndOrVals(2, 0.4);
  g.rule = TieBreakingRule::ByIndex(2, 2);
  BidGrid grid;
  grid.step = 0.05;
  const BidProfile p = BidProfile::FromRows({{0.4, 0.4}, {0.4, 0.4}});
  for (int i = 0; i < 2; ++i) EXPECT_LE(GridBestDeviation(g, p, i, grid).gain(), 1e-12);
  for (int i = 0; i < 2; ++i) EXPECT_LE(ContinuumBestDeviation(g, p, i).gain(), 1e-12);
  grid.step = 0.1;
  grid.max = 0.5;
  EXPECT_TRUE(ContainsProfile(PureNashSearch(g, grid, 0.0).equilibria, p));
}

TEST(PureNashTest, CapRejected) {
  Game g;
  g.valuations = AndOrVals(3, 1.0);
  g.rule = TieBreakingRule::ByIndex(2, 3);
  BidGrid grid;
  grid.step = 0.05;
  EXPECT_THROW(PureNashSearch(g, grid, 0.0), Error);
}

TEST(PureNashTest, EveryReturnedProfileIsEpsilonStable) {
  Rng rng(41);
  BidGrid grid;
  grid.step = 0.25;
  grid.max = 1.0;
  for (int rep = 0; rep < 20; ++rep) {
    Game g;
    for (int i = 0; i < 2; ++i) g.valuations.push_back(testing::RandomMonotone(2, rng, 4));
    g.rule = TieBreakingRule::ByIndex(2, 2);
    const PureNashResult r = PureNashSearch(g, grid, 0.1);
    for (size_t e = 0; e < r.equilibria.size(); ++e) {
      EXPECT_LE(r.max_gains[e], 0.1);
      for (int i = 0; i < 2; ++i) {
        EXPECT_LE(GridBestDeviation(g, r.equilibria[e], i, grid).gain(), 0.1 + 1e-12);
      }
    }
  }
}

TEST(PriorityTest, SingleItemFound) {
  BidGrid grid;
  grid.step = 0.1;
  grid.max = 2.0;
  const auto eq = PureNashSearchAnyPriority(SingleItem(1, 2), grid, 0.0);
  ASSERT_TRUE(eq.has_value());
  EXPECT_EQ(eq->allocation.owner, std::vector<int>{1});
  // Within one grid step of the continuous price range [1, 2].
  EXPECT_GE(eq->prices[0], 1.0 - grid.step - 1e-9);
  EXPECT_LE(eq->prices[0], 2.0 + 1e-9);
  EXPECT_LE(eq->max_gain, 0.0);
}

TEST(PriorityTest, TriangleHasNoneAtSmallEpsilon) {
  BidGrid grid;
  grid.step = 0.05;
  grid.max = 1.0;
  EXPECT_FALSE(PureNashSearchAnyPriority(TriangleInstance().Valuations(), grid, 0.05).has_value());
}

// The flattened search agrees with explicit enumeration over every profile
// and every global priority order on tiny games.
TEST(PriorityTest, MatchesExhaustiveSearch) {
  Rng rng(8);
  BidGrid grid;
  grid.step = 0.5;
  grid.max = 1.0;
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<Valuation> vals;
    for (int i = 0; i < 2; ++i) vals.push_back(testing::RandomMonotone(2, rng, 4));
    bool brute = false;
    for (auto o0 : {std::vector<int>{0, 1}, {1, 0}}) {
      for (auto o1 : {std::vector<int>{0, 1}, {1, 0}}) {
        Game g;
        g.valuations = vals;
        g.rule = PriorityRule(2, {o0, o1});
        brute = brute || !PureNashSearch(g, grid, 1e-9).equilibria.empty();
      }
    }
    EXPECT_EQ(PureNashSearchAnyPriority(vals, grid, 1e-9).has_value(), brute) << rep;
  }
}

TEST(LimitTest, FavorFirstCandidateOk) {
  const Game g = SingleItemGame(1, 2, {0, 1});
  const std::vector<double> eps = {0.1, 0.01, 0.001};
  const auto r = LimitEquilibriumCheck(g, BidProfile::FromRows({{1.0}, {1.0}}), eps);
  EXPECT_EQ(r.status, LimitStatus::kOk);
  EXPECT_EQ(r.witnesses.size(), eps.size());
}

TEST(LimitTest, WalrasianCandidateOk) {
  Game g;
  g.valuations = AndOrVals(2, 0.4);
  g.rule = TieBreakingRule::ByIndex(2, 2);
  const auto we = WalrasianSearch(g.valuations);
  ASSERT_TRUE(we.has_value());
  BidProfile cand(2, 2);
  for (int i = 0; i < 2; ++i) cand.SetRow(i, we->prices);
  const std::vector<double> eps = {0.1, 0.05};
  EXPECT_EQ(LimitEquilibriumCheck(g, cand, eps).status, LimitStatus::kOk);
}

TEST(LimitTest, ZeroCandidateFails) {
  const Game g = SingleItemGame(1, 2, {0, 1});
  const std::vector<double> eps = {0.1, 0.01};
  const auto r = LimitEquilibriumCheck(g, BidProfile::FromRows({{0.0}, {0.0}}), eps);
  EXPECT_EQ(r.status, LimitStatus::kFailure);
  EXPECT_EQ(r.failed_epsilon, 0.1);
}

TEST(LimitTest, RejectsBadEpsilons) {
  const Game g = SingleItemGame(1, 2, {0, 1});
  const BidProfile c = BidProfile::FromRows({{1.0}, {1.0}});
  EXPECT_THROW(LimitEquilibriumCheck(g, c, std::vector<double>{0.01, 0.1}), Error);
  EXPECT_THROW(LimitEquilibriumCheck(g, c, std::vector<double>{0.0}), Error);
}

TEST(LimitTest, LargeLatticeInconclusive) {
  Game g;
  g.valuations = {Valuation::Additive({1, 1, 1, 1}), Valuation::Additive({1, 1, 1, 1}),
                  Valuation::Additive({1, 1, 1, 1})};
  g.rule = TieBreakingRule::ByIndex(3, 4);
  const auto r = LimitEquilibriumCheck(g, BidProfile(3, 4), std::vector<double>{0.1});
  EXPECT_EQ(r.status, LimitStatus::kInconclusive);
}

TEST(DeviationTest, GridReductionMatchesEnumeration) {
  Rng rng(17);
  for (int rep = 0; rep < 80; ++rep) {
    const int n = 2 + static_cast<int>(rng.Below(2));
    const int m = 1 + static_cast<int>(rng.Below(3));
    Game g;
    for (int i = 0; i < n; ++i) g.valuations.push_back(testing::RandomMonotone(m, rng, 6));
    std::vector<std::vector<int>> orders;
    for (int j = 0; j < m; ++j) {
      std::vector<int> o(n);
      for (int i = 0; i < n; ++i) o[i] = i;
      for (int i = n - 1; i > 0; --i) std::swap(o[i], o[rng.Below(i + 1)]);
      orders.push_back(o);
    }
    g.rule = PriorityRule(n, orders);
    BidGrid grid;
    grid.step = 0.25;
    grid.max = 1.0;
    BidProfile bids(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) bids.at(i, j) = 0.25 * static_cast<double>(rng.Below(5));
    }
    const int player = static_cast<int>(rng.Below(n));
    const DeviationResult fast = GridBestDeviation(g, bids, player, grid);
    Money brute = -1e18;
    BidProfile trial = bids;
    for (const BidVector& a : grid.Actions(g.valuations[player])) {
      trial.SetRow(player, a);
      brute = std::max(brute, PlayerUtility(g.valuations[player], trial, player,
                                            g.rule.priority()));
    }
    EXPECT_NEAR(fast.best, brute, 1e-12) << rep;
    EXPECT_NEAR(fast.current,
                PlayerUtility(g.valuations[player], bids, player, g.rule.priority()), 1e-12);
    trial.SetRow(player, fast.best_bid);
    EXPECT_NEAR(PlayerUtility(g.valuations[player], trial, player, g.rule.priority()),
                fast.best, 1e-12);
    EXPECT_LE(fast.best, ContinuumBestDeviation(g, bids, player).best + 1e-12);
  }
}

TEST(DeviationTest, RefiningGridDoesNotShrinkBest) {
  const Game g = SingleItemGame(1, 2, {0, 1});
  const BidProfile bids = BidProfile::FromRows({{0.0}, {0.33}});
  BidGrid coarse;
  coarse.step = 0.2;
  coarse.max = 2.0;
  BidGrid fine = coarse;
  fine.step = 0.1;
  EXPECT_LE(GridBestDeviation(g, bids, 0, coarse).best, GridBestDeviation(g, bids, 0, fine).best);
  EXPECT_NEAR(ContinuumBestDeviation(g, bids, 0).best, 1.0 - 0.33, 1e-12);
}

TEST(GapTest, OpponentBidsZero) {
  const Game g = SingleItemGame(1, 1, {1, 0});
  MixedProfile p;
  p.strategies = {FiniteStrategy::Pure({0.0}), FiniteStrategy::Pure({0.0})};
  BidGrid grid;
  grid.step = 0.01;
  grid.max = 1.0;
  const GapReport r = BestResponseGap(g, p, 0, grid);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.gap, 1.0 - grid.step, 1e-12);
  EXPECT_NEAR(r.best_deviation[0], grid.step, 1e-12);
}

TEST(GapTest, AndOrAnalyticGapsVanish) {
  const AndOrEquilibrium eq(2, 1.0);
  const Game g = eq.MakeGame();
  BidGrid grid;
  grid.step = 1e-3;
  grid.max = 0.5;
  for (int i = 0; i < 2; ++i) {
    const GapReport r = BestResponseGap(g, MixedProfile::AndOr(eq), i, grid);
    EXPECT_TRUE(r.analytic);
    EXPECT_LE(r.gap, 1e-9);
    EXPECT_GE(r.gap, -1e-9);
  }
}

TEST(GapTest, TriangleAnalyticGapVanishes) {
  const SingleMindedInstance inst = TriangleInstance();
  Game g;
  g.valuations = inst.Valuations();
  g.rule = TieBreakingRule::ByIndex(3, 3);
  BidGrid grid;
  grid.step = 0.01;
  grid.max = 0.5;
  for (int i = 0; i < 3; ++i) {
    const GapReport r = BestResponseGap(g, MixedProfile::SingleMinded(inst, 2, 2), i, grid);
    EXPECT_TRUE(r.analytic);
    EXPECT_LE(std::abs(r.gap), 1e-9);
  }
}

// Monte Carlo with the closed form hidden must agree with the analytic gap.
TEST(GapTest, MonteCarloAgreesWithAnalytic) {
  const AndOrEquilibrium eq(2, 0.8);
  const Game g = eq.MakeGame();
  MixedProfile hidden = MixedProfile::AndOr(eq);
  hidden.analytic = std::monostate{};
  BidGrid grid;
  grid.step = 0.1;
  grid.max = 0.5;
  for (int i = 0; i < 2; ++i) {
    const GapReport mc = BestResponseGap(g, hidden, i, grid, 200000, 3);
    EXPECT_FALSE(mc.analytic);
    EXPECT_GT(mc.ci_half_width, 0.0);
    EXPECT_LE(mc.gap, 3 * mc.ci_half_width + 1e-3) << i;
    EXPECT_GE(mc.gap, -3 * mc.ci_half_width) << i;
  }
}

TEST(GapTest, FiniteGapMatchesHandComputation) {
  // Player 1 values the item at 1 and bids 0.5; player 0 mixes 0 and 0.6.
  const Game g = SingleItemGame(1, 1, {0, 1});
  MixedProfile p;
  p.strategies = {FiniteStrategy{{{0.0}, {0.6}}, {0.5, 0.5}}, FiniteStrategy::Pure({0.5})};
  BidGrid grid;
  grid.step = 0.1;
  grid.max = 1.0;
  const GapReport r = BestResponseGap(g, p, 1, grid);
  EXPECT_NEAR(r.equilibrium_utility, 0.25, 1e-12);
  // Bidding 0.1 wins against the zero bid: 0.45. Bidding 0.7 wins always: 0.3.
  EXPECT_NEAR(r.best_deviation_utility, 0.45, 1e-12);
  EXPECT_NEAR(r.best_deviation[0], 0.1, 1e-12);
  EXPECT_NEAR(r.gap, 0.2, 1e-12);
}

}  // namespace
}  // namespace sfpa
