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

#ifndef SFPA_DYNAMICS_H_
#define SFPA_DYNAMICS_H_

#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfpa/auction.h"
#include "sfpa/closed_form.h"
#include "sfpa/strategy.h"

namespace sfpa {

inline constexpr double kMaxMaterializedActions = 1e6;

// A game restricted to finite per-player action lists. Non-factorized games
// materialize every action; Create throws kPrecondition above 1e6 per player.
class FiniteGame {
 public:
  static FiniteGame Create(Game game, std::vector<BidGrid> grids);
  static FiniteGame Create(Game game, const BidGrid& grid);

  const Game& game() const { return game_; }
  const std::vector<BidGrid>& grids() const { return grids_; }
  int n() const { return game_.n(); }
  int m() const { return game_.m(); }
  int64_t action_count(int player) const { return counts_[player]; }
  // Action `index` of `player` in grid enumeration order.
  BidVector Action(int player, int64_t index) const;
  // Materialized action list; empty for factorized games.
  const std::vector<BidVector>& actions(int player) const { return actions_[player]; }

  // True when every player has an additive valuation on the same full
  // product grid under a deterministic rule. Utilities then split into
  // per-item terms and learners can run per item.
  bool factorized() const { return factorized_; }
  const std::vector<Money>& levels() const { return levels_; }

  // Bounds on any achievable utility: [-max bid total, v(M)].
  std::pair<Money, Money> PayoffRange(int player) const;

 private:
  Game game_;
  std::vector<BidGrid> grids_;
  std::vector<int64_t> counts_;
  std::vector<std::vector<BidVector>> actions_;  // empty when factorized
  std::vector<Money> levels_;
  bool factorized_ = false;
};

struct NoRegretOptions {
  int64_t rounds = 1000;
  uint64_t seed = 1;
  // Keep per-round records (played actions, utilities, running regret).
  bool record_rounds = true;
};

struct PlayerLearning {
  int64_t actions = 0;
  Money payoff_lo = 0.0;
  Money payoff_hi = 0.0;
  Money cumulative_realized = 0.0;  // sum_t u_i(b_t)
  Money cumulative_expected = 0.0;  // sum_t <p_t, u_t>
  Money best_fixed = 0.0;           // max_a sum_t u_i(a, b_{-i,t})
  int64_t best_fixed_action = 0;
  double envelope = 0.0;            // 2 sqrt(T ln K) (payoff range)

  Money realized_regret() const { return best_fixed - cumulative_realized; }
  Money expected_regret() const { return best_fixed - cumulative_expected; }
  bool within_envelope() const { return expected_regret() <= envelope + 1e-9; }
};

struct LearningTrace {
  int n = 0;
  int64_t rounds = 0;
  uint64_t seed = 0;
  std::vector<PlayerLearning> players;
  Money mean_welfare = 0.0;
  Money mean_revenue = 0.0;
  // rounds x n, row-major; empty unless records were requested.
  std::vector<int64_t> played;
  std::vector<Money> utilities;
  std::vector<Money> regrets;  // running realized regret after each round

  int64_t Played(int64_t round, int player) const { return played[round * n + player]; }
  // Distinct action profiles with their empirical frequencies, sorted.
  std::vector<std::pair<std::vector<int64_t>, double>> EmpiricalDistribution() const;
};

// Multiplicative weights with eta_t = sqrt(ln K / t) on payoffs rescaled to
// [0, 1] by each player's payoff range, full-information counterfactuals
// against the realized bids. Throws kUsage for zero rounds.
LearningTrace RunNoRegret(const FiniteGame& game, const NoRegretOptions& options);

// Post-hoc check that the empirical distribution is an approximate CCE:
// gains[i] = max_a E[u_i(a, b_{-i})] - E[u_i(b)], recomputed through the
// auction rather than the learner's bookkeeping.
struct CceCheck {
  std::vector<Money> gains;
  std::vector<Money> allowed;  // realized regret / T
  bool ok = true;
};
CceCheck VerifyCce(const FiniteGame& game, const LearningTrace& trace);

struct BoundCheck {
  bool applicable = false;
  bool holds = false;
  Money rhs = 0.0;    // factor * welfare + slack
  Money slack = 0.0;
  std::string note;
};

struct CceWelfareReport {
  Money opt = 0.0;
  Money welfare = 0.0;
  double ratio = 0.0;
  double beta = 1.0;
  std::vector<Money> epsilons;  // per-player average realized regret, >= 0
  BoundCheck xos;               // OPT <= 2 beta W + slack
  BoundCheck general;           // OPT <= 4 m W + slack
};
CceWelfareReport CceWelfareRatio(const FiniteGame& game, const LearningTrace& trace);

// Kolmogorov-Smirnov distance between a projection of one player's played
// bids and a reference distribution.
double MarginalKs(const FiniteGame& game, const LearningTrace& trace, int player,
                  const std::function<double(const BidVector&)>& projection,
                  const AtomicCdf& reference);

// round,player,action,utility,regret
void WriteTraceCsv(const LearningTrace& trace, std::ostream& out);

}  // namespace sfpa

#endif  // SFPA_DYNAMICS_H_
