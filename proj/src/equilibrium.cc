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

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfpa/simplex.h"
#include "sfpa/stats.h"

namespace sfpa {

Money ExpectedPlayerUtility(const Game& game, const BidProfile& bids, int player) {
  if (game.rule.deterministic()) {
    return PlayerUtility(game.valuations[player], bids, player, game.rule.priority());
  }
  Money total = 0.0;
  for (const auto& branch : game.rule.mixture()) {
    total += branch.probability *
             PlayerUtility(game.valuations[player], bids, player, branch.rule);
  }
  return total;
}

namespace {

Money PriceOf(std::span<const Money> prices, ItemSet s) {
  Money total = 0.0;
  for (uint32_t b = s.bits(); b != 0; b &= b - 1) total += prices[std::countr_zero(b)];
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Walrasian equilibria

ItemSet Demand(const Valuation& v, std::span<const Money> prices, Money* utility) {
  ItemSet best;
  Money best_u = 0.0;
  ForEachSubset(v.universe(), [&](ItemSet s) {
    const Money u = v.Value(s) - PriceOf(prices, s);
    if (u > best_u) {
      best_u = u;
      best = s;
    }
  });
  if (utility != nullptr) *utility = best_u;
  return best;
}

std::optional<DemandDeviation> WalrasianCheck(std::span<const Valuation> vals,
                                              const WalrasianEquilibrium& we) {
  const int n = static_cast<int>(vals.size());
  for (Money p : we.prices) {
    if (!(p >= 0) || !std::isfinite(p)) Fail(ErrorKind::kUsage, "prices must be nonnegative");
  }
  const std::vector<ItemSet> bundles = we.allocation.Bundles(n);
  for (int i = 0; i < n; ++i) {
    const Money assigned = vals[i].Value(bundles[i]) - PriceOf(we.prices, bundles[i]);
    Money best = 0.0;
    const ItemSet demand = Demand(vals[i], we.prices, &best);
    if (best > assigned + kMoneyTolerance) {
      return DemandDeviation{i, demand, best - assigned};
    }
  }
  return std::nullopt;
}

std::optional<PriceVector> SupportingPrices(std::span<const Valuation> vals,
                                            const Allocation& allocation) {
  const int n = static_cast<int>(vals.size());
  const int m = static_cast<int>(allocation.owner.size());
  const std::vector<ItemSet> bundles = allocation.Bundles(n);
  const ItemSet universe = ItemSet::Full(m);
  // Variables: p_0..p_{m-1}, t.
  const int t_var = m;

  auto base_lp = [&]() {
    LinearProgram lp;
    lp.num_vars = m + 1;
    lp.objective.assign(m + 1, 0.0);
    for (int j = 0; j < m; ++j) {
      std::vector<double> row(m + 1, 0.0);
      row[j] = 1.0;
      row[t_var] = -1.0;
      lp.AddRow(std::move(row), 0.0);
    }
    return lp;
  };
  // Row for: v_i(S_i) - p(S_i) >= v_i(T) - p(T).
  auto demand_row = [&](int i, ItemSet t) {
    Cut cut;
    cut.row.assign(m + 1, 0.0);
    for (int j : bundles[i].Minus(t).Indices()) cut.row[j] += 1.0;
    for (int j : t.Minus(bundles[i]).Indices()) cut.row[j] -= 1.0;
    cut.bound = vals[i].Value(bundles[i]) - vals[i].Value(t);
    return cut;
  };
  auto seed_rows = [&](LinearProgram& lp) {
    for (int i = 0; i < n; ++i) {
      Cut c = demand_row(i, ItemSet());
      lp.AddRow(std::move(c.row), c.bound);
      for (int j = 0; j < m; ++j) {
        if (bundles[i].Contains(j)) continue;
        Cut d = demand_row(i, bundles[i].With(j));
        lp.AddRow(std::move(d.row), d.bound);
      }
    }
  };
  auto separator = [&](std::span<const double> x) -> std::optional<Cut> {
    double worst = 1e-10;
    std::optional<Cut> out;
    for (int i = 0; i < n; ++i) {
      const Money assigned = vals[i].Value(bundles[i]) - PriceOf(x.first(m), bundles[i]);
      ForEachSubset(universe, [&](ItemSet t) {
        const Money violation = vals[i].Value(t) - PriceOf(x.first(m), t) - assigned;
        if (violation > worst) {
          worst = violation;
          out = demand_row(i, t);
        }
      });
    }
    return out;
  };

  LinearProgram stage1 = base_lp();
  seed_rows(stage1);
  stage1.objective[t_var] = -1.0;
  const LpResult r1 = SolveLpLazy(stage1, separator);
  if (r1.status == LpStatus::kInfeasible) return std::nullopt;
  if (r1.status != LpStatus::kOptimal) {
    Fail(ErrorKind::kInternal, "Walrasian price LP did not converge");
  }
  const double t_star = r1.x[t_var];

  LinearProgram stage2 = base_lp();
  seed_rows(stage2);
  {
    std::vector<double> cap(m + 1, 0.0);
    cap[t_var] = 1.0;
    stage2.AddRow(std::move(cap), t_star + 1e-10);
  }
  for (int j = 0; j < m; ++j) stage2.objective[j] = -1.0;
  const LpResult r2 = SolveLpLazy(stage2, separator);
  const std::vector<double>& x =
      r2.status == LpStatus::kOptimal ? r2.x : r1.x;
  PriceVector prices(m);
  for (int j = 0; j < m; ++j) {
    prices[j] = std::max(0.0, x[j]);
    // Snap LP round-off onto nearby short binary fractions.
    const double snapped = std::round(prices[j] * 1e9) / 1e9;
    if (std::abs(snapped - prices[j]) < 1e-11) prices[j] = snapped;
  }
  return prices;
}

std::optional<WalrasianEquilibrium> WalrasianSearch(std::span<const Valuation> vals) {
  if (vals.empty()) Fail(ErrorKind::kUsage, "no valuations");
  if (vals.front().m() > 12) {
    Fail(ErrorKind::kPrecondition, "Walrasian search limited to m <= 12");
  }
  const std::vector<Allocation> optima = OptimalAllocations(vals);
  // Prices supporting one efficient allocation support all of them, so a
  // short prefix is enough; the rest guards against LP round-off.
  const size_t limit = std::min<size_t>(optima.size(), 16);
  for (size_t k = 0; k < limit; ++k) {
    std::optional<PriceVector> prices = SupportingPrices(vals, optima[k]);
    if (!prices) continue;
    WalrasianEquilibrium we{optima[k], *prices};
    if (!WalrasianCheck(vals, we)) return we;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Deviations

DeviationResult GridBestDeviation(const Game& game, const BidProfile& bids, int player,
                                  const BidGrid& grid) {
  const Valuation& v = game.valuations[player];
  const int m = bids.m();
  DeviationResult out;
  out.current = ExpectedPlayerUtility(game, bids, player);
  BidProfile scratch = bids;

  if (game.rule.deterministic() && grid.family == GridFamily::kFull) {
    const PriorityRule& rule = game.rule.priority();
    const std::vector<Money> levels = grid.Levels();
    // Cheapest winning level per item; the best response over the product
    // grid bids it on some set T and zero elsewhere.
    std::vector<Money> cost(m, 0.0);
    uint32_t winnable = 0;
    for (int j = 0; j < m; ++j) {
      Money opp = 0.0;
      for (int k = 0; k < bids.n(); ++k) {
        if (k != player) opp = std::max(opp, bids.at(k, j));
      }
      auto start = static_cast<size_t>(
          std::max(0.0, std::ceil((opp - kTieTolerance) / grid.step - 1e-9)));
      for (size_t q = start; q < levels.size() && q <= start + 1; ++q) {
        scratch.at(player, j) = levels[q];
        if (WinnerOf(scratch, j, rule) == player) {
          cost[j] = levels[q];
          winnable |= 1u << j;
          break;
        }
      }
      scratch.at(player, j) = 0.0;
    }
    out.best = -std::numeric_limits<double>::infinity();
    ForEachSubset(ItemSet(winnable), [&](ItemSet t) {
      for (int j = 0; j < m; ++j) scratch.at(player, j) = t.Contains(j) ? cost[j] : 0.0;
      const Money u = PlayerUtility(v, scratch, player, rule);
      if (u > out.best) {
        out.best = u;
        out.best_bid.assign(scratch.row(player).begin(), scratch.row(player).end());
      }
    });
    return out;
  }

  out.best = -std::numeric_limits<double>::infinity();
  for (const BidVector& action : grid.Actions(v)) {
    scratch.SetRow(player, action);
    const Money u = ExpectedPlayerUtility(game, scratch, player);
    if (u > out.best) {
      out.best = u;
      out.best_bid = action;
    }
  }
  return out;
}

DeviationResult ContinuumBestDeviation(const Game& game, const BidProfile& bids,
                                       int player) {
  const Valuation& v = game.valuations[player];
  const int m = bids.m();
  DeviationResult out;
  out.current = ExpectedPlayerUtility(game, bids, player);
  // Bidding just above the others' maximum wins exactly the chosen set, so
  // the supremum is max_T v(T) - sum_{j in T} max_{k != i} b_kj.
  std::vector<Money> opp(m, 0.0);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < bids.n(); ++k) {
      if (k != player) opp[j] = std::max(opp[j], bids.at(k, j));
    }
  }
  out.best = -std::numeric_limits<double>::infinity();
  ForEachSubset(v.universe(), [&](ItemSet t) {
    const Money u = v.Value(t) - PriceOf(opp, t);
    if (u > out.best) {
      out.best = u;
      out.best_bid.assign(m, 0.0);
      for (int j : t.Indices()) out.best_bid[j] = opp[j];
    }
  });
  out.best = std::max(out.best, out.current);
  return out;
}

// ---------------------------------------------------------------------------
// Pure Nash search

PureNashResult PureNashSearch(const Game& game, const BidGrid& grid, Money epsilon) {
  std::vector<BidGrid> grids(game.n(), grid);
  return PureNashSearch(game, grids, epsilon);
}

PureNashResult PureNashSearch(const Game& game, std::span<const BidGrid> grids,
                              Money epsilon) {
  game.Validate();
  const int n = game.n();
  const int m = game.m();
  if (static_cast<int>(grids.size()) != n) Fail(ErrorKind::kUsage, "one grid per player required");
  double total = 1.0;
  for (int i = 0; i < n; ++i) total *= grids[i].ActionCount(game.valuations[i]);
  if (total > kMaxProfiles) {
    Fail(ErrorKind::kPrecondition, "grid profile count exceeds the 1e7 cap");
  }
  std::vector<std::vector<BidVector>> actions(n);
  for (int i = 0; i < n; ++i) actions[i] = grids[i].Actions(game.valuations[i]);

  PureNashResult out;
  std::vector<size_t> idx(n, 0);
  BidProfile bids(n, m);
  while (true) {
    for (int i = 0; i < n; ++i) bids.SetRow(i, actions[i][idx[i]]);
    ++out.profiles_examined;
    Money worst = 0.0;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const DeviationResult d = GridBestDeviation(game, bids, i, grids[i]);
      worst = std::max(worst, d.gain());
      ok = d.gain() <= epsilon + kTieTolerance;
    }
    if (ok) {
      out.equilibria.push_back(bids);
      out.max_gains.push_back(worst);
    }
    int i = n - 1;
    while (i >= 0 && ++idx[i] == actions[i].size()) idx[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

namespace {

PriorityRule OwnerFirst(int n, const Allocation& allocation) {
  std::vector<std::vector<int>> orders;
  for (int owner : allocation.owner) {
    std::vector<int> order{owner};
    for (int i = 0; i < n; ++i) {
      if (i != owner) order.push_back(i);
    }
    orders.push_back(std::move(order));
  }
  return PriorityRule(n, std::move(orders));
}

// Largest deviation gain in the flat profile (everyone bids p_j on item j,
// owner wins ties), or +inf once a player exceeds `epsilon`.
Money FlatProfileGain(const std::vector<std::vector<Money>>& tables, int m,
                      const std::vector<int>& owner, std::span<const Money> prices,
                      std::span<const Money> raised, std::span<const bool> raisable,
                      Money epsilon) {
  const int n = static_cast<int>(tables.size());
  const uint32_t full = (1u << m) - 1u;
  Money worst = 0.0;
  Money cost_sum[1 << 12];
  for (int i = 0; i < n; ++i) {
    uint32_t own = 0;
    uint32_t allowed = 0;
    Money cost[12];
    for (int j = 0; j < m; ++j) {
      if (owner[j] == i) {
        own |= 1u << j;
        allowed |= 1u << j;
        cost[j] = prices[j];
      } else if (raisable[j]) {
        allowed |= 1u << j;
        cost[j] = raised[j];
      }
    }
    Money current = tables[i][own];
    for (int j = 0; j < m; ++j) {
      if (own >> j & 1u) current -= prices[j];
    }
    Money best = current;
    cost_sum[0] = 0.0;
    for (uint32_t t = 1; t <= full; ++t) {
      const int low = std::countr_zero(t);
      cost_sum[t] = cost_sum[t & (t - 1)] + cost[low];
      if ((t & ~allowed) != 0) continue;
      best = std::max(best, tables[i][t] - cost_sum[t]);
    }
    best = std::max(best, 0.0);
    const Money gain = best - current;
    if (gain > epsilon + kTieTolerance) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, gain);
  }
  return worst;
}

}  // namespace

std::optional<PriorityEquilibrium> CheckFlatProfile(std::span<const Valuation> vals,
                                                    const BidGrid& grid,
                                                    const Allocation& allocation,
                                                    const PriceVector& prices,
                                                    Money epsilon) {
  const int n = static_cast<int>(vals.size());
  const int m = static_cast<int>(prices.size());
  if (m > 12) Fail(ErrorKind::kPrecondition, "flat-profile check limited to m <= 12");
  std::vector<std::vector<Money>> tables;
  for (const auto& v : vals) tables.push_back(v.ToTable());
  std::vector<Money> raised(m, 0.0);
  bool raisable[12];
  for (int j = 0; j < m; ++j) {
    const std::optional<Money> up = grid.LevelAbove(prices[j]);
    raisable[j] = up.has_value();
    raised[j] = up.value_or(0.0);
  }
  const Money gain = FlatProfileGain(tables, m, allocation.owner, prices, raised,
                                     std::span<const bool>(raisable, m), epsilon);
  if (!std::isfinite(gain)) return std::nullopt;
  PriorityEquilibrium eq;
  eq.allocation = allocation;
  eq.prices = prices;
  eq.rule = OwnerFirst(n, allocation);
  eq.profile = BidProfile(n, m);
  for (int i = 0; i < n; ++i) eq.profile.SetRow(i, prices);
  eq.max_gain = gain;
  return eq;
}

std::optional<PriorityEquilibrium> PureNashSearchAnyPriority(
    std::span<const Valuation> vals, const BidGrid& grid, Money epsilon) {
  const int n = static_cast<int>(vals.size());
  if (n == 0) Fail(ErrorKind::kUsage, "no valuations");
  const int m = vals.front().m();
  if (m > 12) Fail(ErrorKind::kPrecondition, "priority search limited to m <= 12");
  const std::vector<Money> levels = grid.Levels();
  const double work = std::pow(static_cast<double>(n), m) *
                      std::pow(static_cast<double>(levels.size()), m);
  if (work > 1e9) Fail(ErrorKind::kPrecondition, "allocation x price grid exceeds 1e9");

  std::vector<std::vector<Money>> tables;
  for (const auto& v : vals) tables.push_back(v.ToTable());
  std::vector<int> owner(m, 0);
  std::vector<size_t> pidx(m, 0);
  std::vector<Money> prices(m), raised(m);
  bool raisable[12];
  while (true) {
    std::fill(pidx.begin(), pidx.end(), 0);
    while (true) {
      for (int j = 0; j < m; ++j) {
        prices[j] = levels[pidx[j]];
        raisable[j] = pidx[j] + 1 < levels.size();
        raised[j] = raisable[j] ? levels[pidx[j] + 1] : 0.0;
      }
      const Money gain = FlatProfileGain(tables, m, owner, prices, raised,
                                         std::span<const bool>(raisable, m), epsilon);
      if (std::isfinite(gain)) {
        PriorityEquilibrium eq;
        eq.allocation.owner = owner;
        eq.prices = prices;
        eq.rule = OwnerFirst(n, eq.allocation);
        eq.profile = BidProfile(n, m);
        for (int i = 0; i < n; ++i) eq.profile.SetRow(i, prices);
        eq.max_gain = gain;
        return eq;
      }
      int j = m - 1;
      while (j >= 0 && ++pidx[j] == levels.size()) pidx[j--] = 0;
      if (j < 0) break;
    }
    int j = m - 1;
    while (j >= 0 && ++owner[j] == n) owner[j--] = 0;
    if (j < 0) break;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Limit equilibria

LimitCheckResult LimitEquilibriumCheck(const Game& game, const BidProfile& candidate,
                                       std::span<const double> epsilons) {
  game.Validate();
  candidate.Validate();
  if (epsilons.empty()) Fail(ErrorKind::kUsage, "epsilon list is empty");
  for (size_t k = 0; k < epsilons.size(); ++k) {
    if (!(epsilons[k] > 0)) Fail(ErrorKind::kUsage, "epsilons must be positive");
    if (k > 0 && !(epsilons[k] < epsilons[k - 1])) {
      Fail(ErrorKind::kUsage, "epsilons must be decreasing");
    }
  }
  const int n = game.n();
  const int m = game.m();
  LimitCheckResult result;
  for (double eps : epsilons) {
    const double step = eps / m;
    // Per-coordinate lattice points within eps of the candidate, >= 0.
    std::vector<std::vector<Money>> coords(static_cast<size_t>(n) * m);
    double total = 1.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        auto& c = coords[static_cast<size_t>(i) * m + j];
        for (int q = -m; q <= m; ++q) {
          const Money b = candidate.at(i, j) + q * step;
          if (b >= -kTieTolerance) c.push_back(std::max(0.0, b));
        }
        total *= static_cast<double>(c.size());
      }
    }
    if (total > kMaxProfiles) {
      result.status = LimitStatus::kInconclusive;
      result.failed_epsilon = eps;
      return result;
    }
    std::vector<size_t> idx(coords.size(), 0);
    BidProfile bids(n, m);
    bool found = false;
    while (!found) {
      for (size_t c = 0; c < coords.size(); ++c) {
        bids.at(static_cast<int>(c / m), static_cast<int>(c % m)) = coords[c][idx[c]];
      }
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        ok = ContinuumBestDeviation(game, bids, i).gain() <= eps + kTieTolerance;
      }
      if (ok) {
        found = true;
        result.witnesses.push_back(bids);
        break;
      }
      int c = static_cast<int>(coords.size()) - 1;
      while (c >= 0 && ++idx[c] == coords[c].size()) idx[c--] = 0;
      if (c < 0) break;
    }
    if (!found) {
      result.status = LimitStatus::kFailure;
      result.failed_epsilon = eps;
      return result;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Mixed profiles and best-response gaps

MixedProfile MixedProfile::AndOr(const AndOrEquilibrium& eq) {
  MixedProfile p;
  p.strategies = {eq.AndStrategy(), eq.OrStrategy()};
  p.analytic = AndOrForm{eq.m(), eq.v()};
  return p;
}

MixedProfile MixedProfile::SingleMinded(const SingleMindedInstance& instance, int k,
                                        int d) {
  instance.Validate(k, d);
  const SingleMindedSymmetric sm(k, d, instance.value);
  MixedProfile p;
  for (int i = 0; i < instance.n(); ++i) p.strategies.push_back(sm.Strategy(instance, i));
  p.analytic = SingleMindedForm{instance, k, d};
  return p;
}

FiniteUtilities FiniteExpectedUtilities(const Game& game,
                                        std::span<const FiniteStrategy> strategies,
                                        int player, std::span<const BidVector> actions) {
  const int n = game.n();
  const int m = game.m();
  if (static_cast<int>(strategies.size()) != n) {
    Fail(ErrorKind::kUsage, "one strategy per player required");
  }
  double combos = 1.0;
  for (int i = 0; i < n; ++i) {
    strategies[i].Validate(m);
    if (i != player) combos *= static_cast<double>(strategies[i].bids.size());
  }
  if (combos * static_cast<double>(actions.size() + strategies[player].bids.size()) > 2e8) {
    Fail(ErrorKind::kPrecondition, "exact enumeration exceeds 2e8 evaluations");
  }
  FiniteUtilities out;
  out.actions.assign(actions.size(), 0.0);
  BidProfile bids(n, m);
  std::vector<size_t> idx(n, 0);
  while (true) {
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      if (i == player) continue;
      bids.SetRow(i, strategies[i].bids[idx[i]]);
      prob *= strategies[i].probs[idx[i]];
    }
    if (prob > 0) {
      const FiniteStrategy& own = strategies[player];
      for (size_t s = 0; s < own.bids.size(); ++s) {
        bids.SetRow(player, own.bids[s]);
        out.own += prob * own.probs[s] * ExpectedPlayerUtility(game, bids, player);
      }
      for (size_t a = 0; a < actions.size(); ++a) {
        bids.SetRow(player, actions[a]);
        out.actions[a] += prob * ExpectedPlayerUtility(game, bids, player);
      }
    }
    int i = n - 1;
    while (i >= 0 && (i == player || ++idx[i] == strategies[i].bids.size())) {
      if (i != player) idx[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

namespace {

GapReport AndOrGap(const AndOrForm& form, int player, const BidGrid& grid) {
  const AndOrEquilibrium eq(form.m, form.v);
  GapReport r;
  r.analytic = true;
  r.exact = true;
  if (grid.family == GridFamily::kFull) {
    const auto g = player == AndOrEquilibrium::kAndPlayer ? eq.AndGridGap(grid)
                                                          : eq.OrGridGap(grid);
    r.gap = g.gap;
    r.best_deviation = g.best_deviation;
    r.best_deviation_utility = g.best_utility;
    r.deviations = static_cast<int64_t>(std::pow(grid.Levels().size(), form.m));
  } else {
    const Valuation v = player == AndOrEquilibrium::kAndPlayer
                            ? Valuation::And(form.m, 1.0)
                            : Valuation::Or(form.m, form.v);
    r.best_deviation_utility = -std::numeric_limits<double>::infinity();
    for (const BidVector& a : grid.Actions(v)) {
      const Money u = player == AndOrEquilibrium::kAndPlayer ? eq.AndUtility(a).value
                                                             : eq.OrUtility(a).value;
      ++r.deviations;
      if (u > r.best_deviation_utility) {
        r.best_deviation_utility = u;
        r.best_deviation = a;
      }
    }
  }
  r.equilibrium_utility = player == AndOrEquilibrium::kAndPlayer
                              ? eq.AndEquilibriumUtility()
                              : eq.OrEquilibriumUtility();
  r.gap = r.best_deviation_utility - r.equilibrium_utility;
  return r;
}

GapReport SingleMindedGap(const SingleMindedForm& form, int player, const BidGrid& grid) {
  const SingleMindedSymmetric sm(form.k, form.d, form.instance.value);
  const std::vector<int> items = form.instance.bundles.at(player).Indices();
  const int k = static_cast<int>(items.size());
  const std::vector<Money> levels = grid.Levels();
  GapReport r;
  r.analytic = true;
  r.exact = true;

  // Equilibrium utility: E over the own draw of the diagonal utility.
  constexpr int kNodes = 2000;
  RunningStat eq_u;
  for (int q = 0; q < kNodes; ++q) {
    const Money x = sm.cdf().Quantile((q + 0.5) / kNodes);
    const std::vector<Money> diag(k, x);
    eq_u.Add(sm.Utility(diag).value);
  }
  r.equilibrium_utility = eq_u.mean();

  r.best_deviation_utility = -std::numeric_limits<double>::infinity();
  std::vector<Money> x(k, 0.0);
  auto consider = [&]() {
    const Money u = sm.Utility(x).value;
    ++r.deviations;
    if (u > r.best_deviation_utility) {
      r.best_deviation_utility = u;
      r.best_deviation.assign(form.instance.m, 0.0);
      for (int q = 0; q < k; ++q) r.best_deviation[items[q]] = x[q];
    }
  };
  if (grid.family == GridFamily::kFull) {
    if (std::pow(static_cast<double>(levels.size()), k) > 2e8) {
      Fail(ErrorKind::kPrecondition, "deviation grid exceeds 2e8 points");
    }
    std::vector<size_t> idx(k, 0);
    while (true) {
      for (int q = 0; q < k; ++q) x[q] = levels[idx[q]];
      consider();
      int q = k - 1;
      while (q >= 0 && ++idx[q] == levels.size()) idx[q--] = 0;
      if (q < 0) break;
    }
  } else {
    const Valuation v = Valuation::SingleMinded(form.instance.m,
                                                form.instance.bundles[player],
                                                form.instance.value);
    for (const BidVector& a : grid.Actions(v)) {
      for (int q = 0; q < k; ++q) x[q] = a[items[q]];
      consider();
    }
  }
  r.gap = r.best_deviation_utility - r.equilibrium_utility;
  return r;
}

GapReport FiniteGap(const Game& game, const MixedProfile& profile, int player,
                    const BidGrid& grid) {
  std::vector<FiniteStrategy> fs;
  for (const auto& s : profile.strategies) fs.push_back(std::get<FiniteStrategy>(s));
  const std::vector<BidVector> actions = grid.Actions(game.valuations[player]);
  const FiniteUtilities u = FiniteExpectedUtilities(game, fs, player, actions);
  GapReport r;
  r.exact = true;
  r.equilibrium_utility = u.own;
  const auto best = std::max_element(u.actions.begin(), u.actions.end());
  r.best_deviation_utility = *best;
  r.best_deviation = actions[best - u.actions.begin()];
  r.deviations = static_cast<int64_t>(actions.size());
  r.gap = r.best_deviation_utility - r.equilibrium_utility;
  return r;
}

GapReport MonteCarloGap(const Game& game, const MixedProfile& profile, int player,
                        const BidGrid& grid, int64_t trials, uint64_t seed) {
  const int n = game.n();
  const int m = game.m();
  const std::vector<BidVector> actions = grid.Actions(game.valuations[player]);
  if (static_cast<double>(actions.size()) * static_cast<double>(trials) > 5e8) {
    Fail(ErrorKind::kPrecondition, "Monte Carlo gap exceeds 5e8 evaluations");
  }
  std::vector<BidProfile> samples;
  samples.reserve(trials);
  std::vector<Money> eq_u(trials);
  constexpr int64_t kChunk = 1 << 16;
  Rng rng(seed, 0);
  for (int64_t t = 0; t < trials; ++t) {
    if (t % kChunk == 0) rng = Rng(seed, static_cast<uint64_t>(t / kChunk));
    BidProfile bids(n, m);
    for (int i = 0; i < n; ++i) SampleStrategy(profile.strategies[i], rng, bids.row(i));
    eq_u[t] = ExpectedPlayerUtility(game, bids, player);
    samples.push_back(std::move(bids));
  }
  RunningStat eq_stat;
  for (Money u : eq_u) eq_stat.Add(u);

  GapReport r;
  r.equilibrium_utility = eq_stat.mean();
  r.best_deviation_utility = -std::numeric_limits<double>::infinity();
  size_t best_action = 0;
  for (size_t a = 0; a < actions.size(); ++a) {
    RunningStat s;
    for (auto& bids : samples) {
      std::vector<Money> saved(bids.row(player).begin(), bids.row(player).end());
      bids.SetRow(player, actions[a]);
      s.Add(ExpectedPlayerUtility(game, bids, player));
      bids.SetRow(player, saved);
    }
    if (s.mean() > r.best_deviation_utility) {
      r.best_deviation_utility = s.mean();
      best_action = a;
    }
  }
  RunningStat diff;
  for (int64_t t = 0; t < trials; ++t) {
    BidProfile bids = samples[t];
    bids.SetRow(player, actions[best_action]);
    diff.Add(ExpectedPlayerUtility(game, bids, player) - eq_u[t]);
  }
  r.best_deviation = actions[best_action];
  r.deviations = static_cast<int64_t>(actions.size());
  r.gap = r.best_deviation_utility - r.equilibrium_utility;
  r.ci_half_width = diff.ToEstimate().ci_half_width;
  return r;
}

}  // namespace

GapReport BestResponseGap(const Game& game, const MixedProfile& profile, int player,
                          const BidGrid& grid, int64_t trials, uint64_t seed) {
  game.Validate();
  if (static_cast<int>(profile.strategies.size()) != game.n()) {
    Fail(ErrorKind::kUsage, "profile needs one strategy per player");
  }
  if (player < 0 || player >= game.n()) Fail(ErrorKind::kUsage, "player index out of range");
  grid.Validate();
  if (const auto* f = std::get_if<AndOrForm>(&profile.analytic)) {
    return AndOrGap(*f, player, grid);
  }
  if (const auto* f = std::get_if<SingleMindedForm>(&profile.analytic)) {
    return SingleMindedGap(*f, player, grid);
  }
  const bool all_finite =
      std::all_of(profile.strategies.begin(), profile.strategies.end(),
                  [](const MixedStrategy& s) { return std::holds_alternative<FiniteStrategy>(s); });
  if (all_finite) return FiniteGap(game, profile, player, grid);
  if (trials <= 0) Fail(ErrorKind::kUsage, "trials must be positive");
  return MonteCarloGap(game, profile, player, grid, trials, seed);
}

}  // namespace sfpa
