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

#ifndef SFPA_EQUILIBRIUM_H_
#define SFPA_EQUILIBRIUM_H_

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sfpa/auction.h"
#include "sfpa/closed_form.h"
#include "sfpa/strategy.h"

namespace sfpa {

using PriceVector = std::vector<Money>;

struct WalrasianEquilibrium {
  Allocation allocation;
  PriceVector prices;
};

struct DemandDeviation {
  int player = 0;
  ItemSet bundle;
  Money gain = 0.0;  // improvement over the assigned bundle at these prices
};

// Utility-maximizing bundle at `prices` (2^m scan, first maximizer).
ItemSet Demand(const Valuation& v, std::span<const Money> prices, Money* utility = nullptr);

// nullopt when every assigned bundle is demand-optimal within 1e-9.
std::optional<DemandDeviation> WalrasianCheck(std::span<const Valuation> vals,
                                              const WalrasianEquilibrium& we);

// Searches welfare-optimal allocations for supporting prices. Among
// supporting prices it returns the ones minimizing the largest price, then
// the total price. m <= 12 and n^m <= 1e7.
std::optional<WalrasianEquilibrium> WalrasianSearch(std::span<const Valuation> vals);

// Supporting prices for a fixed allocation, or nullopt.
std::optional<PriceVector> SupportingPrices(std::span<const Valuation> vals,
                                            const Allocation& allocation);

// Largest utility gain player `player` can get by a deviation inside the
// grid's family, holding the others' bids fixed. For the full product grid
// and a deterministic rule this is exact without enumerating the grid.
struct DeviationResult {
  Money current = 0.0;
  Money best = 0.0;
  BidVector best_bid;
  Money gain() const { return best - current; }
};
DeviationResult GridBestDeviation(const Game& game, const BidProfile& bids, int player,
                                  const BidGrid& grid);

// Supremum over every real bid vector (deterministic rules).
DeviationResult ContinuumBestDeviation(const Game& game, const BidProfile& bids,
                                       int player);

struct PureNashResult {
  std::vector<BidProfile> equilibria;
  std::vector<Money> max_gains;  // per equilibrium, largest deviation gain
  int64_t profiles_examined = 0;
};

inline constexpr double kMaxProfiles = 1e7;

// Every profile over the players' grid actions in which no player gains
// more than `epsilon` by a grid deviation. Throws kPrecondition above 1e7
// profiles.
PureNashResult PureNashSearch(const Game& game, std::span<const BidGrid> grids,
                              Money epsilon);
PureNashResult PureNashSearch(const Game& game, const BidGrid& grid, Money epsilon);

// Pure epsilon-equilibrium on the full product grid for some per-item
// priority rule. It suffices to look at profiles where everybody bids the
// same grid price p_j on item j and ties go to the intended owner: any grid
// equilibrium can be flattened that way without raising any deviation gain.
struct PriorityEquilibrium {
  Allocation allocation;
  PriceVector prices;
  PriorityRule rule;
  BidProfile profile;
  Money max_gain = 0.0;
};
std::optional<PriorityEquilibrium> PureNashSearchAnyPriority(
    std::span<const Valuation> vals, const BidGrid& grid, Money epsilon);

// Checks the owner-first, everybody-bids-p profile directly.
std::optional<PriorityEquilibrium> CheckFlatProfile(std::span<const Valuation> vals,
                                                    const BidGrid& grid,
                                                    const Allocation& allocation,
                                                    const PriceVector& prices,
                                                    Money epsilon);

enum class LimitStatus { kOk, kFailure, kInconclusive };

struct LimitCheckResult {
  LimitStatus status = LimitStatus::kOk;
  double failed_epsilon = 0.0;   // first epsilon without a witness
  std::vector<BidProfile> witnesses;  // one per epsilon that succeeded
};

// For each epsilon, looks for an epsilon-equilibrium (continuum deviations)
// within max-distance epsilon of `candidate` on the lattice of step
// epsilon/m. Above 1e7 lattice points the answer is kInconclusive.
LimitCheckResult LimitEquilibriumCheck(const Game& game, const BidProfile& candidate,
                                       std::span<const double> epsilons);

// Closed-form structure attached to a profile so gaps can be computed
// analytically.
struct AndOrForm {
  int m = 2;
  double v = 1.0;
};
struct SingleMindedForm {
  SingleMindedInstance instance;
  int k = 2;
  int d = 2;
};
using AnalyticForm = std::variant<std::monostate, AndOrForm, SingleMindedForm>;

struct MixedProfile {
  std::vector<MixedStrategy> strategies;
  AnalyticForm analytic;

  static MixedProfile AndOr(const AndOrEquilibrium& eq);
  static MixedProfile SingleMinded(const SingleMindedInstance& instance, int k, int d);
};

struct GapReport {
  Money gap = 0.0;
  double ci_half_width = 0.0;  // 0 for exact computations
  bool analytic = false;
  bool exact = false;
  Money equilibrium_utility = 0.0;
  Money best_deviation_utility = 0.0;
  BidVector best_deviation;
  int64_t deviations = 0;
};

// Expected utility of `player` under its own finite strategy and under each
// pure action, when the others play their finite strategies independently.
struct FiniteUtilities {
  Money own = 0.0;
  std::vector<Money> actions;
};
FiniteUtilities FiniteExpectedUtilities(const Game& game,
                                        std::span<const FiniteStrategy> strategies,
                                        int player, std::span<const BidVector> actions);

// Expected utility under a tie rule mixture, summed branch by branch.
Money ExpectedPlayerUtility(const Game& game, const BidProfile& bids, int player);

// max over grid deviations of E[deviation utility] - E[equilibrium
// utility]. Analytic for closed forms, exact enumeration when all
// strategies have finite support, otherwise Monte Carlo over `trials`
// opponent draws with a 99% CI on the difference.
GapReport BestResponseGap(const Game& game, const MixedProfile& profile, int player,
                          const BidGrid& grid, int64_t trials = 100000,
                          uint64_t seed = 1);

}  // namespace sfpa

#endif  // SFPA_EQUILIBRIUM_H_
