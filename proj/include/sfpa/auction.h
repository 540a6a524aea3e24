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

#ifndef SFPA_AUCTION_H_
#define SFPA_AUCTION_H_

#include <algorithm>
#include <span>
#include <variant>
#include <vector>

#include "sfpa/common.h"
#include "sfpa/valuation.h"

namespace sfpa {

// n x m matrix of nonnegative bids, row-major by player.
class BidProfile {
 public:
  BidProfile() = default;
  BidProfile(int n, int m) : n_(n), m_(m), bids_(static_cast<size_t>(n) * m, 0.0) {}
  BidProfile(int n, int m, std::vector<Money> bids);
  static BidProfile FromRows(const std::vector<std::vector<Money>>& rows);

  int n() const { return n_; }
  int m() const { return m_; }
  Money& at(int player, int item) { return bids_[Index(player, item)]; }
  Money at(int player, int item) const { return bids_[Index(player, item)]; }
  std::span<Money> row(int player) {
    return {bids_.data() + static_cast<size_t>(player) * m_, static_cast<size_t>(m_)};
  }
  std::span<const Money> row(int player) const {
    return {bids_.data() + static_cast<size_t>(player) * m_, static_cast<size_t>(m_)};
  }
  void SetRow(int player, std::span<const Money> bids);
  const std::vector<Money>& data() const { return bids_; }

  // Throws kUsage on negative or non-finite entries.
  void Validate() const;

 private:
  size_t Index(int player, int item) const {
    return static_cast<size_t>(player) * m_ + item;
  }
  int n_ = 0;
  int m_ = 0;
  std::vector<Money> bids_;
};

// Deterministic tie-breaking: each item has a priority order over players;
// among bids tied for the maximum, the earliest player in the order wins.
class PriorityRule {
 public:
  PriorityRule() = default;
  // orders[j] is a permutation of 0..n-1, highest priority first.
  PriorityRule(int n, std::vector<std::vector<int>> orders);
  // Same order on every item.
  static PriorityRule Global(int n, int m, const std::vector<int>& order);
  // Lower player index wins.
  static PriorityRule ByIndex(int n, int m);

  int n() const { return n_; }
  int m() const { return static_cast<int>(orders_.size()); }
  const std::vector<std::vector<int>>& orders() const { return orders_; }
  // Position of `player` in item j's order (0 = highest priority).
  int rank(int item, int player) const { return ranks_[static_cast<size_t>(item) * n_ + player]; }

  bool operator==(const PriorityRule& o) const { return orders_ == o.orders_; }

 private:
  int n_ = 0;
  std::vector<std::vector<int>> orders_;
  std::vector<int> ranks_;
};

struct WeightedRule {
  double probability = 0.0;
  PriorityRule rule;
};

// Either one priority rule or a probability mixture of priority rules.
class TieBreakingRule {
 public:
  TieBreakingRule() = default;
  TieBreakingRule(PriorityRule rule) : variant_(std::move(rule)) {}  // NOLINT
  static TieBreakingRule Randomized(std::vector<WeightedRule> mixture);
  static TieBreakingRule ByIndex(int n, int m) { return PriorityRule::ByIndex(n, m); }

  bool deterministic() const { return std::holds_alternative<PriorityRule>(variant_); }
  const PriorityRule& priority() const { return std::get<PriorityRule>(variant_); }
  const std::vector<WeightedRule>& mixture() const {
    return std::get<std::vector<WeightedRule>>(variant_);
  }
  // Deterministic rules as a one-element mixture.
  std::vector<WeightedRule> Branches() const;
  int n() const;
  int m() const;

 private:
  std::variant<PriorityRule, std::vector<WeightedRule>> variant_;
};

// owner[j] = player receiving item j.
struct Allocation {
  std::vector<int> owner;

  ItemSet BundleOf(int player) const {
    uint32_t bits = 0;
    for (size_t j = 0; j < owner.size(); ++j) {
      if (owner[j] == player) bits |= 1u << j;
    }
    return ItemSet(bits);
  }
  std::vector<ItemSet> Bundles(int n) const;
  bool operator==(const Allocation&) const = default;
};

struct AllocationBranch {
  double probability = 1.0;
  Allocation allocation;
};

// Highest bidder on item j, ties resolved by `rule`.
inline int WinnerOf(const BidProfile& bids, int item, const PriorityRule& rule) {
  Money top = bids.at(0, item);
  for (int i = 1; i < bids.n(); ++i) top = std::max(top, bids.at(i, item));
  int best = -1;
  for (int i = 0; i < bids.n(); ++i) {
    if (bids.at(i, item) >= top - kTieTolerance &&
        (best < 0 || rule.rank(item, i) < rule.rank(item, best))) {
      best = i;
    }
  }
  return best;
}

Allocation Allocate(const BidProfile& bids, const PriorityRule& rule);
std::vector<AllocationBranch> Allocate(const BidProfile& bids, const TieBreakingRule& rule);

struct OutcomeBranch {
  double probability = 1.0;
  Allocation allocation;
  std::vector<Money> utilities;
  std::vector<Money> item_prices;
  Money welfare = 0.0;
  Money revenue = 0.0;
};

// Expected utilities, prices, welfare, and revenue; `branches` holds one
// entry per deterministic rule in the tie-breaking mixture.
struct Outcome {
  std::vector<Money> utilities;
  std::vector<Money> item_prices;
  Money welfare = 0.0;
  Money revenue = 0.0;
  std::vector<OutcomeBranch> branches;
};

Outcome ComputeOutcome(std::span<const Valuation> vals, const BidProfile& bids,
                       const TieBreakingRule& rule);

// Utility of `player` under a deterministic rule (no allocation of the
// branch vector; hot path for searches and Monte Carlo).
Money PlayerUtility(const Valuation& v, const BidProfile& bids, int player,
                    const PriorityRule& rule);

struct WelfareOptimum {
  Money value = 0.0;
  Allocation allocation;
};

inline constexpr double kMaxAssignments = 1e7;

// Exhaustive search over assignments that give each item to a player whose
// value depends on it (player 0 for items nobody values). The optimum equals
// the one over all n^m assignments. Among optima the first in lexicographic
// order of (owner[0], owner[1], ...) is returned. Throws kPrecondition when
// the searched space exceeds 1e7.
WelfareOptimum OptimalWelfare(std::span<const Valuation> vals);

// Every assignment of the searched space within `tolerance` of the optimum,
// in lexicographic order.
std::vector<Allocation> OptimalAllocations(std::span<const Valuation> vals,
                                           double tolerance = kMoneyTolerance);

// Sum of v_i(S_i).
Money Welfare(std::span<const Valuation> vals, const Allocation& allocation);

// Valuations and a tie rule over a common item set.
struct Game {
  std::vector<Valuation> valuations;
  TieBreakingRule rule;

  int n() const { return static_cast<int>(valuations.size()); }
  int m() const { return valuations.empty() ? 0 : valuations.front().m(); }
  // Throws kUsage if valuations disagree on m or the rule has wrong shape.
  void Validate() const;
};

}  // namespace sfpa

#endif  // SFPA_AUCTION_H_
