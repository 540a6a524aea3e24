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

#include "sfpa/bayes.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "sfpa/equilibrium.h"

namespace sfpa {

int FiniteBayesianGame::m() const {
  if (types.empty() || types.front().empty()) return 0;
  return types.front().front().m();
}

void FiniteBayesianGame::Validate() const {
  const int n = this->n();
  if (n == 0) Fail(ErrorKind::kUsage, "Bayesian game has no players");
  const int m = this->m();
  for (const auto& player_types : types) {
    if (player_types.empty()) Fail(ErrorKind::kUsage, "every player needs a type");
    for (const Valuation& v : player_types) {
      if (v.m() != m) Fail(ErrorKind::kUsage, "types disagree on the item count");
    }
  }
  if (rule.n() != n || rule.m() != m) Fail(ErrorKind::kUsage, "tie rule shape mismatch");
  if (prior.empty()) Fail(ErrorKind::kUsage, "prior is empty");
  std::map<std::vector<int>, int> seen;
  double total = 0.0;
  for (const PriorEntry& e : prior) {
    if (static_cast<int>(e.types.size()) != n) Fail(ErrorKind::kUsage, "prior entry has wrong width");
    for (int i = 0; i < n; ++i) {
      if (e.types[i] < 0 || e.types[i] >= static_cast<int>(types[i].size())) {
        Fail(ErrorKind::kUsage, "prior entry references an unknown type");
      }
    }
    if (!(e.probability >= 0) || !std::isfinite(e.probability)) {
      Fail(ErrorKind::kUsage, "prior probabilities must be nonnegative");
    }
    if (seen[e.types]++ > 0) Fail(ErrorKind::kUsage, "duplicate type profile in prior");
    total += e.probability;
  }
  if (std::abs(total - 1.0) > kProbTolerance) Fail(ErrorKind::kUsage, "prior must sum to 1");
  if (product && !IsProduct()) {
    Fail(ErrorKind::kUsage, "prior declared product-form but does not factorize");
  }
}

std::vector<double> FiniteBayesianGame::Marginal(int player) const {
  std::vector<double> out(types.at(player).size(), 0.0);
  for (const PriorEntry& e : prior) out[e.types[player]] += e.probability;
  return out;
}

bool FiniteBayesianGame::IsProduct() const {
  const int n = this->n();
  std::vector<std::vector<double>> marginals;
  double profiles = 1.0;
  for (int i = 0; i < n; ++i) {
    marginals.push_back(Marginal(i));
    profiles *= static_cast<double>(types[i].size());
  }
  if (profiles > 1e7) Fail(ErrorKind::kPrecondition, "type space too large to check");
  std::map<std::vector<int>, double> table;
  for (const PriorEntry& e : prior) table[e.types] = e.probability;
  std::vector<int> idx(n, 0);
  while (true) {
    double expected = 1.0;
    for (int i = 0; i < n; ++i) expected *= marginals[i][idx[i]];
    const auto it = table.find(idx);
    const double actual = it == table.end() ? 0.0 : it->second;
    if (std::abs(actual - expected) > kProbTolerance) return false;
    int i = n - 1;
    while (i >= 0 && ++idx[i] == static_cast<int>(types[i].size())) idx[i--] = 0;
    if (i < 0) break;
  }
  return true;
}

Game FiniteBayesianGame::GameAt(const std::vector<int>& profile) const {
  Game g;
  for (int i = 0; i < n(); ++i) g.valuations.push_back(types[i][profile[i]]);
  g.rule = rule;
  return g;
}

FiniteBayesianGame FiniteBayesianGame::Degenerate(const Game& game) {
  FiniteBayesianGame bg;
  for (const Valuation& v : game.valuations) bg.types.push_back({v});
  bg.prior.push_back({std::vector<int>(game.n(), 0), 1.0});
  bg.rule = game.rule;
  bg.product = true;
  bg.Validate();
  return bg;
}

FiniteBayesianGame FiniteBayesianGame::Product(
    std::vector<std::vector<Valuation>> types,
    const std::vector<std::vector<double>>& marginals, TieBreakingRule rule) {
  FiniteBayesianGame bg;
  bg.types = std::move(types);
  bg.rule = std::move(rule);
  bg.product = true;
  const int n = bg.n();
  if (static_cast<int>(marginals.size()) != n) Fail(ErrorKind::kUsage, "one marginal per player");
  std::vector<int> idx(n, 0);
  while (n > 0) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      if (marginals[i].size() != bg.types[i].size()) {
        Fail(ErrorKind::kUsage, "marginal length must match the type count");
      }
      p *= marginals[i][idx[i]];
    }
    bg.prior.push_back({idx, p});
    int i = n - 1;
    while (i >= 0 && ++idx[i] == static_cast<int>(bg.types[i].size())) idx[i--] = 0;
    if (i < 0) break;
  }
  bg.Validate();
  return bg;
}

namespace {

void CheckProfile(const FiniteBayesianGame& bg, const BayesProfile& profile) {
  if (static_cast<int>(profile.size()) != bg.n()) {
    Fail(ErrorKind::kUsage, "strategy profile needs one entry per player");
  }
  for (int i = 0; i < bg.n(); ++i) {
    if (profile[i].size() != bg.types[i].size()) {
      Fail(ErrorKind::kUsage, "strategy needs one entry per type");
    }
    for (const FiniteStrategy& s : profile[i]) s.Validate(bg.m());
  }
}

// Unnormalized sums over prior entries with types[player] == type; `mass`
// receives the type's probability.
FiniteUtilities ConditionalSums(const FiniteBayesianGame& bg, const BayesProfile& profile,
                                int player, int type, std::span<const BidVector> actions,
                                double* mass) {
  FiniteUtilities out;
  out.actions.assign(actions.size(), 0.0);
  *mass = 0.0;
  std::vector<FiniteStrategy> strategies(bg.n());
  for (const PriorEntry& e : bg.prior) {
    if (e.types[player] != type || e.probability <= 0) continue;
    *mass += e.probability;
    for (int i = 0; i < bg.n(); ++i) strategies[i] = profile[i][e.types[i]];
    const FiniteUtilities u =
        FiniteExpectedUtilities(bg.GameAt(e.types), strategies, player, actions);
    out.own += e.probability * u.own;
    for (size_t a = 0; a < actions.size(); ++a) out.actions[a] += e.probability * u.actions[a];
  }
  return out;
}

}  // namespace

BayesGapReport BayesDeviationGap(const FiniteBayesianGame& bg, const BayesProfile& profile,
                                 const BidGrid& grid) {
  bg.Validate();
  CheckProfile(bg, profile);
  BayesGapReport report;
  for (int i = 0; i < bg.n(); ++i) {
    for (int t = 0; t < static_cast<int>(bg.types[i].size()); ++t) {
      const std::vector<BidVector> actions = grid.Actions(bg.types[i][t]);
      double mass = 0.0;
      const FiniteUtilities u = ConditionalSums(bg, profile, i, t, actions, &mass);
      if (mass <= 0) continue;
      TypeGap g;
      g.player = i;
      g.type = t;
      g.type_probability = mass;
      g.equilibrium_utility = u.own / mass;
      const auto best = std::max_element(u.actions.begin(), u.actions.end());
      g.best_utility = *best / mass;
      g.best_deviation = actions[best - u.actions.begin()];
      report.max_gap = std::max(report.max_gap, g.gap());
      report.gaps.push_back(std::move(g));
    }
  }
  return report;
}

BayesWelfareReport BayesWelfareBounds(const FiniteBayesianGame& bg,
                                      const BayesProfile& profile, const BidGrid& grid,
                                      Money epsilon) {
  bg.Validate();
  CheckProfile(bg, profile);
  if (!(epsilon >= 0)) Fail(ErrorKind::kUsage, "epsilon must be nonnegative");
  const int n = bg.n();
  const int m = bg.m();
  BayesWelfareReport r;
  r.epsilon = epsilon;

  for (const PriorEntry& e : bg.prior) {
    if (e.probability <= 0) continue;
    const Game game = bg.GameAt(e.types);
    r.expected_opt += e.probability * OptimalWelfare(game.valuations).value;
    // Enumerate every player's support at this type profile.
    std::vector<const FiniteStrategy*> s(n);
    for (int i = 0; i < n; ++i) s[i] = &profile[i][e.types[i]];
    std::vector<size_t> idx(n, 0);
    BidProfile bids(n, m);
    Money welfare = 0.0;
    while (true) {
      double p = 1.0;
      for (int i = 0; i < n; ++i) {
        bids.SetRow(i, s[i]->bids[idx[i]]);
        p *= s[i]->probs[idx[i]];
      }
      if (p > 0) welfare += p * ComputeOutcome(game.valuations, bids, game.rule).welfare;
      int i = n - 1;
      while (i >= 0 && ++idx[i] == s[i]->bids.size()) idx[i--] = 0;
      if (i < 0) break;
    }
    r.expected_welfare += e.probability * welfare;
  }
  if (r.expected_welfare > 0) {
    r.ratio = r.expected_opt / r.expected_welfare;
  } else {
    r.ratio = r.expected_opt > 0 ? std::numeric_limits<double>::infinity() : 1.0;
  }

  r.max_gap = BayesDeviationGap(bg, profile, grid).max_gap;
  r.gap_precondition_ok = r.max_gap <= epsilon + kTieTolerance;

  Money top_value = 0.0;
  r.beta = 1.0;
  for (const auto& player_types : bg.types) {
    for (const Valuation& v : player_types) {
      top_value = std::max(top_value, v.Value(v.universe()));
      r.beta = std::max(r.beta, BetaOf(v).beta);
    }
  }
  r.deviations_on_grid = grid.family == GridFamily::kFull && grid.max + 1e-9 >= top_value;

  const double step = grid.step;
  r.general_rhs = (4.0 * m * n + 2.0) * r.expected_welfare + 2.0 * n * (epsilon + m * step);
  r.general_holds = r.expected_opt <= r.general_rhs + kMoneyTolerance;

  const bool product = bg.IsProduct();
  r.beta_checked = product && std::isfinite(r.beta);
  if (r.beta_checked) {
    r.beta_rhs = 4.0 * r.beta * r.expected_welfare + 2.0 * r.beta * (n * epsilon + m * step);
    r.beta_holds = r.expected_opt <= r.beta_rhs + kMoneyTolerance;
  }

  std::vector<std::string> notes;
  if (!r.gap_precondition_ok) notes.push_back("gap precondition violated");
  if (!product) notes.push_back("prior is not product-form; 4 beta check skipped");
  if (product && !std::isfinite(r.beta)) notes.push_back("no finite beta; 4 beta check skipped");
  if (!r.deviations_on_grid) notes.push_back("grid does not contain every deviation bid");
  for (size_t k = 0; k < notes.size(); ++k) r.note += (k ? "; " : "") + notes[k];
  if (r.note.empty()) r.note = "ok";
  return r;
}

BestResponseRun BayesBestResponseDynamics(const FiniteBayesianGame& bg, const BidGrid& grid,
                                          int max_sweeps) {
  bg.Validate();
  const int n = bg.n();
  const int m = bg.m();
  BestResponseRun run;
  run.profile.resize(n);
  for (int i = 0; i < n; ++i) {
    run.profile[i].assign(bg.types[i].size(), FiniteStrategy::Pure(BidVector(m, 0.0)));
  }
  std::vector<std::vector<std::vector<BidVector>>> actions(n);
  for (int i = 0; i < n; ++i) {
    for (const Valuation& v : bg.types[i]) actions[i].push_back(grid.Actions(v));
  }
  for (run.sweeps = 1; run.sweeps <= max_sweeps; ++run.sweeps) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < static_cast<int>(bg.types[i].size()); ++t) {
        double mass = 0.0;
        const FiniteUtilities u = ConditionalSums(bg, run.profile, i, t, actions[i][t], &mass);
        if (mass <= 0) continue;
        const auto best = std::max_element(u.actions.begin(), u.actions.end());
        if (*best > u.own + kTieTolerance * mass) {
          run.profile[i][t] = FiniteStrategy::Pure(actions[i][t][best - u.actions.begin()]);
          changed = true;
        }
      }
    }
    if (!changed) {
      run.converged = true;
      return run;
    }
  }
  run.sweeps = max_sweeps;
  return run;
}

}  // namespace sfpa
