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

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sfpa {

BidProfile::BidProfile(int n, int m, std::vector<Money> bids)
    : n_(n), m_(m), bids_(std::move(bids)) {
  if (bids_.size() != static_cast<size_t>(n) * m) {
    Fail(ErrorKind::kUsage, "bid matrix has wrong size");
  }
}

BidProfile BidProfile::FromRows(const std::vector<std::vector<Money>>& rows) {
  const int n = static_cast<int>(rows.size());
  const int m = n == 0 ? 0 : static_cast<int>(rows.front().size());
  BidProfile out(n, m);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != m) {
      Fail(ErrorKind::kUsage, "bid rows have different lengths");
    }
    out.SetRow(i, rows[i]);
  }
  return out;
}

void BidProfile::SetRow(int player, std::span<const Money> bids) {
  std::copy(bids.begin(), bids.end(), row(player).begin());
}

void BidProfile::Validate() const {
  for (Money b : bids_) {
    if (!std::isfinite(b) || b < 0) {
      Fail(ErrorKind::kUsage, "bids must be finite and nonnegative");
    }
  }
}

PriorityRule::PriorityRule(int n, std::vector<std::vector<int>> orders)
    : n_(n), orders_(std::move(orders)) {
  ranks_.assign(orders_.size() * static_cast<size_t>(n_), -1);
  for (size_t j = 0; j < orders_.size(); ++j) {
    if (static_cast<int>(orders_[j].size()) != n_) {
      Fail(ErrorKind::kUsage, "priority order is not a permutation of the players");
    }
    for (int pos = 0; pos < n_; ++pos) {
      const int p = orders_[j][pos];
      if (p < 0 || p >= n_ || ranks_[j * n_ + p] != -1) {
        Fail(ErrorKind::kUsage, "priority order is not a permutation of the players");
      }
      ranks_[j * n_ + p] = pos;
    }
  }
}

PriorityRule PriorityRule::Global(int n, int m, const std::vector<int>& order) {
  return PriorityRule(n, std::vector<std::vector<int>>(m, order));
}

PriorityRule PriorityRule::ByIndex(int n, int m) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  return Global(n, m, order);
}

TieBreakingRule TieBreakingRule::Randomized(std::vector<WeightedRule> mixture) {
  if (mixture.empty()) Fail(ErrorKind::kUsage, "empty tie-breaking mixture");
  double total = 0.0;
  for (const auto& w : mixture) {
    if (w.probability < 0) Fail(ErrorKind::kUsage, "negative mixture probability");
    if (w.rule.n() != mixture.front().rule.n() || w.rule.m() != mixture.front().rule.m()) {
      Fail(ErrorKind::kUsage, "mixture rules disagree on shape");
    }
    total += w.probability;
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    Fail(ErrorKind::kUsage, "tie-breaking mixture probabilities must sum to 1");
  }
  TieBreakingRule out;
  out.variant_ = std::move(mixture);
  return out;
}

std::vector<WeightedRule> TieBreakingRule::Branches() const {
  if (deterministic()) return {WeightedRule{1.0, priority()}};
  return mixture();
}

int TieBreakingRule::n() const {
  return deterministic() ? priority().n() : mixture().front().rule.n();
}

int TieBreakingRule::m() const {
  return deterministic() ? priority().m() : mixture().front().rule.m();
}

std::vector<ItemSet> Allocation::Bundles(int n) const {
  std::vector<ItemSet> out(n);
  for (size_t j = 0; j < owner.size(); ++j) out[owner[j]] = out[owner[j]].With(static_cast<int>(j));
  return out;
}

Allocation Allocate(const BidProfile& bids, const PriorityRule& rule) {
  Allocation a;
  a.owner.resize(bids.m());
  for (int j = 0; j < bids.m(); ++j) a.owner[j] = WinnerOf(bids, j, rule);
  return a;
}

std::vector<AllocationBranch> Allocate(const BidProfile& bids,
                                       const TieBreakingRule& rule) {
  std::vector<AllocationBranch> out;
  for (const auto& branch : rule.Branches()) {
    out.push_back({branch.probability, Allocate(bids, branch.rule)});
  }
  return out;
}

Outcome ComputeOutcome(std::span<const Valuation> vals, const BidProfile& bids,
                       const TieBreakingRule& rule) {
  const int n = bids.n();
  const int m = bids.m();
  if (static_cast<int>(vals.size()) != n) {
    Fail(ErrorKind::kUsage, "valuation count differs from bidder count");
  }
  Outcome out;
  out.utilities.assign(n, 0.0);
  out.item_prices.assign(m, 0.0);
  for (const auto& [prob, alloc] : Allocate(bids, rule)) {
    OutcomeBranch br;
    br.probability = prob;
    br.allocation = alloc;
    br.utilities.assign(n, 0.0);
    br.item_prices.assign(m, 0.0);
    const std::vector<ItemSet> bundles = alloc.Bundles(n);
    for (int i = 0; i < n; ++i) {
      const Money value = vals[i].Value(bundles[i]);
      br.utilities[i] = value;
      br.welfare += value;
    }
    for (int j = 0; j < m; ++j) {
      const int w = alloc.owner[j];
      br.item_prices[j] = bids.at(w, j);
      br.utilities[w] -= bids.at(w, j);
      br.revenue += bids.at(w, j);
    }
    for (int i = 0; i < n; ++i) out.utilities[i] += prob * br.utilities[i];
    for (int j = 0; j < m; ++j) out.item_prices[j] += prob * br.item_prices[j];
    out.welfare += prob * br.welfare;
    out.revenue += prob * br.revenue;
    out.branches.push_back(std::move(br));
  }
  return out;
}

Money PlayerUtility(const Valuation& v, const BidProfile& bids, int player,
                    const PriorityRule& rule) {
  uint32_t won = 0;
  Money paid = 0.0;
  for (int j = 0; j < bids.m(); ++j) {
    if (WinnerOf(bids, j, rule) == player) {
      won |= 1u << j;
      paid += bids.at(player, j);
    }
  }
  return v.Value(ItemSet(won)) - paid;
}

Money Welfare(std::span<const Valuation> vals, const Allocation& allocation) {
  Money total = 0.0;
  const auto bundles = allocation.Bundles(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) total += vals[i].Value(bundles[i]);
  return total;
}

namespace {

// Depth-first over items; calls visit(owner, welfare) at each leaf. Item j
// is only offered to players whose value depends on j (player 0 when
// nobody's does): any other assignment can be moved into this space without
// losing welfare.
template <typename Visit>
void EnumerateAssignments(std::span<const Valuation> vals, Visit&& visit) {
  const int n = static_cast<int>(vals.size());
  const int m = vals.empty() ? 0 : vals.front().m();
  if (n == 0) Fail(ErrorKind::kUsage, "no valuations");
  std::vector<std::vector<Money>> tables;
  tables.reserve(n);
  for (const auto& v : vals) {
    if (v.m() != m) Fail(ErrorKind::kUsage, "valuations disagree on item count");
    tables.push_back(v.ToTable());
  }
  std::vector<std::vector<int>> candidates(m);
  double space = 1.0;
  for (int j = 0; j < m; ++j) {
    const uint32_t bit = 1u << j;
    for (int i = 0; i < n; ++i) {
      bool relevant = false;
      for (uint32_t s = 0; s < tables[i].size() && !relevant; ++s) {
        relevant = !(s & bit) && tables[i][s | bit] > tables[i][s];
      }
      if (relevant) candidates[j].push_back(i);
    }
    if (candidates[j].empty()) candidates[j].push_back(0);
    space *= static_cast<double>(candidates[j].size());
  }
  if (space > kMaxAssignments) {
    Fail(ErrorKind::kPrecondition, "assignment space exceeds the 1e7 enumeration cap");
  }
  std::vector<int> owner(m, 0);
  std::vector<uint32_t> masks(n, 0);
  auto recurse = [&](auto&& self, int item) -> void {
    if (item == m) {
      Money w = 0.0;
      for (int i = 0; i < n; ++i) w += tables[i][masks[i]];
      visit(owner, w);
      return;
    }
    for (int i : candidates[item]) {
      owner[item] = i;
      masks[i] |= 1u << item;
      self(self, item + 1);
      masks[i] &= ~(1u << item);
    }
  };
  recurse(recurse, 0);
}

}  // namespace

WelfareOptimum OptimalWelfare(std::span<const Valuation> vals) {
  WelfareOptimum best;
  bool found = false;
  EnumerateAssignments(vals, [&](const std::vector<int>& owner, Money w) {
    if (!found || w > best.value) {
      best.value = w;
      best.allocation.owner = owner;
      found = true;
    }
  });
  return best;
}

std::vector<Allocation> OptimalAllocations(std::span<const Valuation> vals,
                                           double tolerance) {
  const Money opt = OptimalWelfare(vals).value;
  std::vector<Allocation> out;
  EnumerateAssignments(vals, [&](const std::vector<int>& owner, Money w) {
    if (w >= opt - tolerance) out.push_back(Allocation{owner});
  });
  return out;
}

void Game::Validate() const {
  if (valuations.empty()) Fail(ErrorKind::kUsage, "game has no players");
  for (const auto& v : valuations) {
    if (v.m() != m()) Fail(ErrorKind::kUsage, "valuations disagree on item count");
  }
  if (rule.n() != n() || rule.m() != m()) {
    Fail(ErrorKind::kUsage, "tie rule shape does not match the game");
  }
}

}  // namespace sfpa
