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

#include "sfpa/dynamics.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "sfpa/equilibrium.h"
#include "sfpa/rng.h"
#include "sfpa/stats.h"

namespace sfpa {
namespace {

constexpr double kMaxCceWork = 2e8;

// Per-item view of the others' bids for one player under one priority rule.
struct ItemView {
  Money opp = 0.0;
  bool wins_ties = true;
};

void BuildView(const BidProfile& bids, int player, const PriorityRule& rule,
               std::vector<ItemView>& view) {
  const int m = bids.m();
  view.assign(m, ItemView{});
  for (int j = 0; j < m; ++j) {
    Money opp = 0.0;
    bool any = false;
    for (int k = 0; k < bids.n(); ++k) {
      if (k == player) continue;
      opp = any ? std::max(opp, bids.at(k, j)) : bids.at(k, j);
      any = true;
    }
    view[j].opp = opp;
    for (int k = 0; k < bids.n() && any; ++k) {
      if (k != player && bids.at(k, j) >= opp - kTieTolerance &&
          rule.rank(j, k) < rule.rank(j, player)) {
        view[j].wins_ties = false;
      }
    }
  }
}

inline bool Wins(Money bid, const ItemView& view) {
  if (bid > view.opp + kTieTolerance) return true;
  if (bid < view.opp - kTieTolerance) return false;
  return view.wins_ties;
}

// Cumulative-payoff exponential weights.
class Hedge {
 public:
  explicit Hedge(size_t k) : cumulative_(k, 0.0), probs_(k, 0.0) {}

  const std::vector<double>& Distribution(double eta, double range) {
    const double top = *std::max_element(cumulative_.begin(), cumulative_.end());
    double total = 0.0;
    for (size_t a = 0; a < cumulative_.size(); ++a) {
      probs_[a] = std::exp(eta * (cumulative_[a] - top) / range);
      total += probs_[a];
    }
    for (double& p : probs_) p /= total;
    return probs_;
  }

  size_t Sample(Rng& rng) const {
    double u = rng.Uniform();
    for (size_t a = 0; a + 1 < probs_.size(); ++a) {
      if (u < probs_[a]) return a;
      u -= probs_[a];
    }
    return probs_.size() - 1;
  }

  // Adds this round's payoffs; returns the expected payoff under the
  // current distribution.
  double Update(std::span<const double> payoff) {
    double expected = 0.0;
    for (size_t a = 0; a < payoff.size(); ++a) {
      expected += probs_[a] * payoff[a];
      cumulative_[a] += payoff[a];
    }
    return expected;
  }

  const std::vector<double>& cumulative() const { return cumulative_; }

 private:
  std::vector<double> cumulative_;
  std::vector<double> probs_;
};

size_t ArgMax(const std::vector<double>& x) {
  return static_cast<size_t>(std::max_element(x.begin(), x.end()) - x.begin());
}

}  // namespace

FiniteGame FiniteGame::Create(Game game, const BidGrid& grid) {
  std::vector<BidGrid> grids(game.n(), grid);
  return Create(std::move(game), std::move(grids));
}

FiniteGame FiniteGame::Create(Game game, std::vector<BidGrid> grids) {
  game.Validate();
  if (static_cast<int>(grids.size()) != game.n()) {
    Fail(ErrorKind::kUsage, "one grid per player required");
  }
  FiniteGame fg;
  fg.game_ = std::move(game);
  fg.grids_ = std::move(grids);
  const int n = fg.game_.n();
  bool factorized = fg.game_.rule.deterministic();
  for (int i = 0; i < n; ++i) {
    const BidGrid& g = fg.grids_[i];
    g.Validate();
    factorized = factorized && g.family == GridFamily::kFull &&
                 g.step == fg.grids_[0].step && g.max == fg.grids_[0].max &&
                 fg.game_.valuations[i].kind() == ValuationKind::kAdditive;
  }
  fg.factorized_ = factorized;
  for (int i = 0; i < n; ++i) {
    const double count = fg.grids_[i].ActionCount(fg.game_.valuations[i]);
    if (count > 1e15) Fail(ErrorKind::kPrecondition, "action count overflows");
    if (!factorized && count > kMaxMaterializedActions) {
      Fail(ErrorKind::kPrecondition, "more than 1e6 actions to materialize for one player");
    }
    fg.counts_.push_back(static_cast<int64_t>(count));
  }
  if (factorized) {
    fg.levels_ = fg.grids_[0].Levels();
  } else {
    for (int i = 0; i < n; ++i) {
      fg.actions_.push_back(fg.grids_[i].Actions(fg.game_.valuations[i]));
    }
  }
  return fg;
}

BidVector FiniteGame::Action(int player, int64_t index) const {
  if (index < 0 || index >= counts_[player]) Fail(ErrorKind::kUsage, "action index out of range");
  if (!factorized_) return actions_[player][index];
  const int m = this->m();
  const auto levels = static_cast<int64_t>(levels_.size());
  BidVector out(m);
  for (int j = m - 1; j >= 0; --j) {
    out[j] = levels_[index % levels];
    index /= levels;
  }
  return out;
}

std::pair<Money, Money> FiniteGame::PayoffRange(int player) const {
  const Valuation& v = game_.valuations[player];
  const Money hi = v.Value(v.universe());
  Money spend = 0.0;
  if (factorized_) {
    spend = levels_.back() * m();
  } else {
    for (const BidVector& a : actions_[player]) {
      Money s = 0.0;
      for (Money b : a) s += b;
      spend = std::max(spend, s);
    }
  }
  return {-spend, hi};
}

std::vector<std::pair<std::vector<int64_t>, double>> LearningTrace::EmpiricalDistribution()
    const {
  if (played.empty()) Fail(ErrorKind::kUsage, "trace has no per-round records");
  std::map<std::vector<int64_t>, int64_t> counts;
  for (int64_t t = 0; t < rounds; ++t) {
    ++counts[std::vector<int64_t>(played.begin() + t * n, played.begin() + (t + 1) * n)];
  }
  std::vector<std::pair<std::vector<int64_t>, double>> out;
  out.reserve(counts.size());
  for (const auto& [profile, c] : counts) {
    out.emplace_back(profile, static_cast<double>(c) / static_cast<double>(rounds));
  }
  return out;
}

LearningTrace RunNoRegret(const FiniteGame& game, const NoRegretOptions& options) {
  if (options.rounds <= 0) Fail(ErrorKind::kUsage, "rounds must be positive");
  const int n = game.n();
  const int m = game.m();
  const Game& g = game.game();
  const std::vector<WeightedRule> branches = g.rule.Branches();

  LearningTrace trace;
  trace.n = n;
  trace.rounds = options.rounds;
  trace.seed = options.seed;
  trace.players.resize(n);
  std::vector<double> range(n);
  std::vector<double> log_k(n);
  for (int i = 0; i < n; ++i) {
    PlayerLearning& p = trace.players[i];
    p.actions = game.action_count(i);
    std::tie(p.payoff_lo, p.payoff_hi) = game.PayoffRange(i);
    range[i] = std::max(p.payoff_hi - p.payoff_lo, 1e-12);
    log_k[i] = std::log(static_cast<double>(p.actions));
    p.envelope = 2.0 * std::sqrt(static_cast<double>(options.rounds) * log_k[i]) * range[i];
  }
  if (options.record_rounds) {
    const auto cells = static_cast<size_t>(options.rounds) * n;
    trace.played.resize(cells);
    trace.utilities.resize(cells);
    trace.regrets.resize(cells);
  }

  std::vector<Rng> rngs;
  for (int i = 0; i < n; ++i) rngs.emplace_back(options.seed, static_cast<uint64_t>(i));

  // Learner state: one Hedge per player, or per (player, item) when the
  // game factorizes.
  const size_t levels = game.levels().size();
  std::vector<Hedge> hedges;
  std::vector<std::vector<Money>> tables;
  if (game.factorized()) {
    for (int i = 0; i < n * m; ++i) hedges.emplace_back(levels);
  } else {
    for (int i = 0; i < n; ++i) {
      hedges.emplace_back(static_cast<size_t>(game.action_count(i)));
      tables.push_back(g.valuations[i].ToTable());
    }
  }

  BidProfile bids(n, m);
  std::vector<int64_t> chosen(n);
  std::vector<std::vector<size_t>> chosen_levels(n, std::vector<size_t>(m, 0));
  std::vector<ItemView> view;
  std::vector<double> payoff;
  RunningStat welfare;
  RunningStat revenue;
  for (int64_t t = 1; t <= options.rounds; ++t) {
    for (int i = 0; i < n; ++i) {
      const double eta = std::sqrt(log_k[i] / static_cast<double>(t));
      if (game.factorized()) {
        int64_t index = 0;
        for (int j = 0; j < m; ++j) {
          Hedge& h = hedges[i * m + j];
          h.Distribution(eta, range[i]);
          chosen_levels[i][j] = h.Sample(rngs[i]);
          index = index * static_cast<int64_t>(levels) + static_cast<int64_t>(chosen_levels[i][j]);
          bids.at(i, j) = game.levels()[chosen_levels[i][j]];
        }
        chosen[i] = index;
      } else {
        hedges[i].Distribution(eta, range[i]);
        chosen[i] = static_cast<int64_t>(hedges[i].Sample(rngs[i]));
        bids.SetRow(i, game.Action(i, chosen[i]));
      }
    }

    const Outcome outcome = ComputeOutcome(g.valuations, bids, g.rule);
    welfare.Add(outcome.welfare);
    revenue.Add(outcome.revenue);

    for (int i = 0; i < n; ++i) {
      PlayerLearning& p = trace.players[i];
      Money best_cumulative = 0.0;
      Money realized = 0.0;
      if (game.factorized()) {
        BuildView(bids, i, g.rule.priority(), view);
        const std::vector<Money>& w = g.valuations[i].weights();
        for (int j = 0; j < m; ++j) {
          payoff.assign(levels, 0.0);
          for (size_t l = 0; l < levels; ++l) {
            const Money level = game.levels()[l];
            if (Wins(level, view[j])) payoff[l] = w[j] - level;
          }
          Hedge& h = hedges[i * m + j];
          p.cumulative_expected += h.Update(payoff);
          realized += payoff[chosen_levels[i][j]];
          best_cumulative += h.cumulative()[ArgMax(h.cumulative())];
        }
      } else {
        const auto k = static_cast<size_t>(game.action_count(i));
        payoff.assign(k, 0.0);
        const std::vector<BidVector>& actions = game.actions(i);
        for (const WeightedRule& branch : branches) {
          BuildView(bids, i, branch.rule, view);
          for (size_t a = 0; a < k; ++a) {
            const BidVector& action = actions[a];
            uint32_t won = 0;
            Money paid = 0.0;
            for (int j = 0; j < m; ++j) {
              if (Wins(action[j], view[j])) {
                won |= 1u << j;
                paid += action[j];
              }
            }
            payoff[a] += branch.probability * (tables[i][won] - paid);
          }
        }
        p.cumulative_expected += hedges[i].Update(payoff);
        realized = payoff[chosen[i]];
        best_cumulative = hedges[i].cumulative()[ArgMax(hedges[i].cumulative())];
      }
      p.cumulative_realized += realized;
      p.best_fixed = best_cumulative;
      if (options.record_rounds) {
        const size_t cell = static_cast<size_t>(t - 1) * n + i;
        trace.played[cell] = chosen[i];
        trace.utilities[cell] = realized;
        trace.regrets[cell] = best_cumulative - p.cumulative_realized;
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    PlayerLearning& p = trace.players[i];
    if (game.factorized()) {
      int64_t index = 0;
      for (int j = 0; j < m; ++j) {
        index = index * static_cast<int64_t>(levels) +
                static_cast<int64_t>(ArgMax(hedges[i * m + j].cumulative()));
      }
      p.best_fixed_action = index;
    } else {
      p.best_fixed_action = static_cast<int64_t>(ArgMax(hedges[i].cumulative()));
    }
  }
  trace.mean_welfare = welfare.mean();
  trace.mean_revenue = revenue.mean();
  return trace;
}

CceCheck VerifyCce(const FiniteGame& game, const LearningTrace& trace) {
  const int n = game.n();
  const int m = game.m();
  const Game& g = game.game();
  const auto dist = trace.EmpiricalDistribution();
  CceCheck out;
  out.gains.assign(n, 0.0);
  out.allowed.assign(n, 0.0);

  std::vector<BidProfile> profiles;
  profiles.reserve(dist.size());
  for (const auto& [actions, w] : dist) {
    BidProfile bids(n, m);
    for (int i = 0; i < n; ++i) bids.SetRow(i, game.Action(i, actions[i]));
    profiles.push_back(std::move(bids));
  }

  for (int i = 0; i < n; ++i) {
    Money follow = 0.0;
    for (size_t s = 0; s < dist.size(); ++s) {
      follow += dist[s].second * ExpectedPlayerUtility(g, profiles[s], i);
    }
    Money best = -std::numeric_limits<double>::infinity();
    if (game.factorized()) {
      // Additive utility: the best fixed vector is the best level per item.
      const std::vector<Money>& w = g.valuations[i].weights();
      const std::vector<Money>& levels = game.levels();
      if (static_cast<double>(dist.size()) * m * levels.size() > kMaxCceWork) {
        Fail(ErrorKind::kPrecondition, "CCE verification exceeds work cap");
      }
      best = 0.0;
      for (int j = 0; j < m; ++j) {
        Money item_best = -std::numeric_limits<double>::infinity();
        for (Money level : levels) {
          Money total = 0.0;
          for (size_t s = 0; s < dist.size(); ++s) {
            BidProfile& bids = profiles[s];
            const Money saved = bids.at(i, j);
            bids.at(i, j) = level;
            if (WinnerOf(bids, j, g.rule.priority()) == i) total += dist[s].second * (w[j] - level);
            bids.at(i, j) = saved;
          }
          item_best = std::max(item_best, total);
        }
        best += item_best;
      }
    } else {
      const int64_t k = game.action_count(i);
      if (static_cast<double>(dist.size()) * static_cast<double>(k) > kMaxCceWork) {
        Fail(ErrorKind::kPrecondition, "CCE verification exceeds work cap");
      }
      for (int64_t a = 0; a < k; ++a) {
        const BidVector action = game.Action(i, a);
        Money total = 0.0;
        for (size_t s = 0; s < dist.size(); ++s) {
          BidProfile bids = profiles[s];
          bids.SetRow(i, action);
          total += dist[s].second * ExpectedPlayerUtility(g, bids, i);
        }
        best = std::max(best, total);
      }
    }
    out.gains[i] = best - follow;
    out.allowed[i] = std::max(0.0, trace.players[i].realized_regret()) /
                     static_cast<double>(trace.rounds);
    if (out.gains[i] > out.allowed[i] + 1e-9) out.ok = false;
  }
  return out;
}

CceWelfareReport CceWelfareRatio(const FiniteGame& game, const LearningTrace& trace) {
  const int n = game.n();
  const int m = game.m();
  const std::vector<Valuation>& vals = game.game().valuations;
  CceWelfareReport r;
  const WelfareOptimum opt = OptimalWelfare(vals);
  r.opt = opt.value;
  r.welfare = trace.mean_welfare;
  if (r.welfare > 0) {
    r.ratio = r.opt / r.welfare;
  } else {
    r.ratio = r.opt > 0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  Money eps_sum = 0.0;
  for (const PlayerLearning& p : trace.players) {
    r.epsilons.push_back(std::max(0.0, p.realized_regret()) / static_cast<double>(trace.rounds));
    eps_sum += r.epsilons.back();
  }
  r.beta = 1.0;
  for (const Valuation& v : vals) r.beta = std::max(r.beta, BetaOf(v).beta);

  bool full = true;
  double step = 0.0;
  double top = std::numeric_limits<double>::infinity();
  for (const BidGrid& g : game.grids()) {
    full = full && g.family == GridFamily::kFull;
    step = std::max(step, g.step);
    top = std::min(top, g.max);
  }
  auto rounded = [&](Money x) { return std::ceil(x / step - 1e-9) * step; };
  const std::vector<ItemSet> bundles = opt.allocation.Bundles(n);

  // Deviation in the XOS argument: bid half the supporting clause of the
  // optimal bundle, rounded up onto the grid.
  r.xos.note = "ok";
  if (!std::isfinite(r.beta)) {
    r.xos.note = "valuations are not beta-XOS for finite beta";
  } else if (!full) {
    r.xos.note = "structured action families do not contain the deviation bids";
  } else {
    r.xos.applicable = true;
    for (int i = 0; i < n && r.xos.applicable; ++i) {
      if (bundles[i].empty()) continue;
      for (Money a : XosSupportingClause(vals[i], bundles[i])) {
        if (rounded(a / 2.0) > top + 1e-9) {
          r.xos.applicable = false;
          r.xos.note = "deviation bid exceeds the grid maximum";
        }
      }
    }
  }
  r.xos.slack = 2.0 * r.beta * eps_sum + std::max<double>(n, 2.0 * r.beta) * m * step;
  if (std::isfinite(r.beta)) {
    r.xos.rhs = 2.0 * r.beta * r.welfare + r.xos.slack;
    r.xos.holds = r.opt <= r.xos.rhs + kMoneyTolerance;
  }

  // General argument: bid v(S*)/(2|S*|) on each item of the optimal bundle.
  r.general.note = "ok";
  if (!full) {
    r.general.note = "structured action families do not contain the deviation bids";
  } else {
    r.general.applicable = true;
    for (int i = 0; i < n; ++i) {
      if (bundles[i].empty()) continue;
      const Money bid = vals[i].Value(bundles[i]) / (2.0 * bundles[i].size());
      if (rounded(bid) > top + 1e-9) {
        r.general.applicable = false;
        r.general.note = "deviation bid exceeds the grid maximum";
      }
    }
  }
  r.general.slack = 4.0 * m * eps_sum + 2.0 * m * step;
  r.general.rhs = 4.0 * m * r.welfare + r.general.slack;
  r.general.holds = r.opt <= r.general.rhs + kMoneyTolerance;
  return r;
}

double MarginalKs(const FiniteGame& game, const LearningTrace& trace, int player,
                  const std::function<double(const BidVector&)>& projection,
                  const AtomicCdf& reference) {
  if (trace.played.empty()) Fail(ErrorKind::kUsage, "trace has no per-round records");
  std::map<int64_t, int64_t> counts;
  for (int64_t t = 0; t < trace.rounds; ++t) ++counts[trace.Played(t, player)];
  std::vector<std::pair<double, double>> points;
  for (const auto& [a, c] : counts) {
    points.emplace_back(projection(game.Action(player, a)),
                        static_cast<double>(c) / static_cast<double>(trace.rounds));
  }
  return KolmogorovSmirnov(
      std::move(points), [&](double x) { return reference.Cdf(x); },
      [&](double x) { return reference.CdfBelow(x); });
}

void WriteTraceCsv(const LearningTrace& trace, std::ostream& out) {
  if (trace.played.empty()) Fail(ErrorKind::kUsage, "trace has no per-round records");
  out << "round,player,action,utility,regret\n";
  char buf[160];
  for (int64_t t = 0; t < trace.rounds; ++t) {
    for (int i = 0; i < trace.n; ++i) {
      const size_t cell = static_cast<size_t>(t) * trace.n + i;
      std::snprintf(buf, sizeof(buf), "%" PRId64 ",%d,%" PRId64 ",%.17g,%.17g\n", t + 1, i,
                    trace.played[cell], trace.utilities[cell], trace.regrets[cell]);
      out << buf;
    }
  }
}

}  // namespace sfpa
