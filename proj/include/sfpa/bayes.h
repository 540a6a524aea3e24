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

#ifndef SFPA_BAYES_H_
#define SFPA_BAYES_H_

#include <string>
#include <vector>

#include "sfpa/auction.h"
#include "sfpa/strategy.h"

namespace sfpa {

struct PriorEntry {
  std::vector<int> types;  // one type index per player
  double probability = 0.0;
};

// Finite types per player, a prior over type profiles, and a tie rule.
struct FiniteBayesianGame {
  std::vector<std::vector<Valuation>> types;
  std::vector<PriorEntry> prior;
  TieBreakingRule rule;
  // Declared product form; Validate() checks it against the table.
  bool product = false;

  int n() const { return static_cast<int>(types.size()); }
  int m() const;
  // Throws kUsage when the prior is not a distribution over valid type
  // profiles or a declared product form does not match within 1e-12.
  void Validate() const;
  // Whether the table factorizes into its marginals within 1e-12.
  bool IsProduct() const;
  std::vector<double> Marginal(int player) const;
  // Complete-information game at one type profile.
  Game GameAt(const std::vector<int>& profile) const;

  // One type per player with prior mass 1.
  static FiniteBayesianGame Degenerate(const Game& game);
  // Independent types with the given marginals.
  static FiniteBayesianGame Product(std::vector<std::vector<Valuation>> types,
                                    const std::vector<std::vector<double>>& marginals,
                                    TieBreakingRule rule);
};

// strategies[i][t] is the mixed bid of player i with type t.
using BayesProfile = std::vector<std::vector<FiniteStrategy>>;

struct TypeGap {
  int player = 0;
  int type = 0;
  double type_probability = 0.0;
  Money equilibrium_utility = 0.0;  // conditional on the type
  Money best_utility = 0.0;
  BidVector best_deviation;
  Money gap() const { return best_utility - equilibrium_utility; }
};

struct BayesGapReport {
  std::vector<TypeGap> gaps;  // types with positive probability only
  Money max_gap = 0.0;
};

// Exact per-(player, type) improvement from the best grid deviation, with
// expectations over the conditional prior and the others' mixed bids.
BayesGapReport BayesDeviationGap(const FiniteBayesianGame& bg, const BayesProfile& profile,
                                 const BidGrid& grid);

struct BayesWelfareReport {
  Money expected_opt = 0.0;
  Money expected_welfare = 0.0;
  double ratio = 0.0;
  Money epsilon = 0.0;  // assumed equilibrium quality
  Money max_gap = 0.0;
  bool gap_precondition_ok = true;
  bool deviations_on_grid = true;  // grid max reaches every v(M)
  double beta = 1.0;
  // OPT <= (4mn + 2) SW + 2n (eps + m step)
  bool general_holds = false;
  Money general_rhs = 0.0;
  // OPT <= 4 beta SW + 2 beta (n eps + m step); product priors only.
  bool beta_checked = false;
  bool beta_holds = false;
  Money beta_rhs = 0.0;
  std::string note;
};

BayesWelfareReport BayesWelfareBounds(const FiniteBayesianGame& bg,
                                      const BayesProfile& profile, const BidGrid& grid,
                                      Money epsilon);

struct BestResponseRun {
  BayesProfile profile;  // pure strategies
  bool converged = false;
  int sweeps = 0;
};

// Round-robin exact best responses on the grid, starting from zero bids, with
// a type's bid changing only on strict improvement. Stops at a fixed point or
// after `max_sweeps`.
BestResponseRun BayesBestResponseDynamics(const FiniteBayesianGame& bg, const BidGrid& grid,
                                          int max_sweeps = 200);

}  // namespace sfpa

#endif  // SFPA_BAYES_H_
