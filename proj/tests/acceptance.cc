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

// Acceptance harness: one PASS/FAIL line per criterion. Exit status is 0
// only when every criterion passes.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "sfpa/bayes.h"
#include "sfpa/closed_form.h"
#include "sfpa/dynamics.h"
#include "sfpa/equilibrium.h"
#include "sfpa/json_io.h"

namespace sfpa {
namespace {

struct Verdict {
  bool pass = true;
  Json payload = Json::object();
  std::string detail;
};

constexpr uint64_t kSeed = 20260101;
constexpr int64_t kTrials = 1000000;
constexpr int64_t kChunk = 1 << 16;

Estimate SimulateUtility(const Game& game, const std::vector<MixedStrategy>& strategies,
                         int player, int64_t trials, uint64_t seed) {
  RunningStat total;
  BidProfile bids(game.n(), game.m());
  const PriorityRule& rule = game.rule.priority();
  for (int64_t chunk = 0; chunk * kChunk < trials; ++chunk) {
    Rng rng(seed, static_cast<uint64_t>(chunk));
    const int64_t count = std::min(kChunk, trials - chunk * kChunk);
    RunningStat part;
    for (int64_t t = 0; t < count; ++t) {
      for (int i = 0; i < game.n(); ++i) SampleStrategy(strategies[i], rng, bids.row(i));
      part.Add(PlayerUtility(game.valuations[player], bids, player, rule));
    }
    total.Merge(part);
  }
  return total.ToEstimate();
}

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

// AND-OR closed forms: analytic gaps on the 1e-3 grid and Monte Carlo
// equilibrium utilities.
Verdict Criterion1() {
  Verdict o;
  Money worst_gap = -1.0;
  int misses = 0;
  int checks = 0;
  uint64_t stream = 0;
  for (int m : {2, 3, 4, 8}) {
    for (double v : {1.0 / m, 2.0 / m, 1.0}) {
      const AndOrEquilibrium eq(m, v);
      const Game game = eq.MakeGame();
      const MixedProfile profile = MixedProfile::AndOr(eq);
      const Money analytic[2] = {eq.AndEquilibriumUtility(), eq.OrEquilibriumUtility()};
      for (int p = 0; p < 2; ++p) {
        BidGrid grid;
        grid.step = 1e-3;
        grid.max = p == 0 ? 1.0 : std::ceil(v / grid.step - 1e-9) * grid.step;
        const GapReport g = BestResponseGap(game, profile, p, grid);
        o.pass = o.pass && g.analytic && g.gap <= 1e-6;
        worst_gap = std::max(worst_gap, g.gap);
        const Estimate mc = SimulateUtility(game, profile.strategies, p, kTrials, kSeed + stream++);
        const bool covers = mc.Covers(analytic[p]);
        misses += !covers;
        ++checks;
        o.payload["cases"].push_back({{"m", m}, {"v", v}, {"player", p}, {"gap", g.gap},
                                      {"mc", ToJson(mc)}, {"analytic", analytic[p]}});
      }
    }
  }
  o.pass = o.pass && misses == 0;
  o.detail = Fmt("max analytic gap %.3g (<= 1e-6); Monte Carlo outside 99%% CI in %.0f of %.0f",
                 worst_gap, misses, checks);
  return o;
}

Verdict Criterion2() {
  Verdict o;
  const SingleMindedInstance tri = TriangleInstance();
  const AtomicCdf f = TriangleCdf();
  double worst = 0.0;
  constexpr int kN = 500;
  for (int a = 0; a < kN; ++a) {
    for (int b = 0; b < kN; ++b) {
      const double y = 0.5 * a / (kN - 1);
      const double z = 0.5 * b / (kN - 1);
      const std::vector<Money> bids = {y, z};
      const double u = SingleMindedDeviationUtility(tri, 0, bids, f);
      worst = std::max(worst, std::abs(u + 2.0 * (y - z) * (y - z)));
    }
  }
  o.pass = worst <= 1e-12;
  o.payload["triangle_max_error"] = worst;

  double max_u = -1.0;
  double diag_err = 0.0;
  double off_max = -1.0;
  for (auto [k, d] : {std::pair{2, 2}, {3, 2}, {2, 3}, {3, 3}}) {
    const SingleMindedSymmetric sm(k, d);
    const int steps = k == 2 ? 500 : 80;
    std::vector<int> idx(k, 0);
    std::vector<Money> x(k);
    while (true) {
      bool diagonal = true;
      for (int q = 0; q < k; ++q) {
        x[q] = sm.cdf().hi() * idx[q] / steps;
        diagonal = diagonal && idx[q] == idx[0];
      }
      const double u = sm.Utility(x).value;
      max_u = std::max(max_u, u);
      if (diagonal) {
        diag_err = std::max(diag_err, std::abs(u));
      } else {
        off_max = std::max(off_max, u);
      }
      int q = k - 1;
      while (q >= 0 && ++idx[q] > steps) idx[q--] = 0;
      if (q < 0) break;
    }
  }
  o.pass = o.pass && max_u <= 1e-12 && diag_err <= 1e-12 && off_max < -1e-12;
  o.payload["single_minded"] = {{"max_utility", max_u}, {"diagonal_error", diag_err},
                                {"max_off_diagonal", off_max}};
  o.detail = Fmt("triangle error %.3g; single-minded max %.3g, diagonal error %.3g", worst, max_u,
                 diag_err) +
             Fmt(", off-diagonal max %.3g", off_max);
  return o;
}

Verdict Criterion3() {
  Verdict o;
  const AndOrEquilibrium eq(16, 0.25);
  const AndOrWelfareReport r = AndOrEquilibriumWelfare(eq, kTrials, kSeed);
  const double atom_err = std::abs(r.and_atom_frequency.mean - 0.75);
  o.pass = r.welfare.mean <= 0.5 && r.welfare.ci_half_width <= 0.005 && atom_err <= 0.005;
  o.payload = {{"welfare", ToJson(r.welfare)}, {"atom", ToJson(r.and_atom_frequency)}};
  o.detail = Fmt("welfare %.4f +- %.4f (<= 0.5, CI <= 0.005); atom frequency %.4f (0.75 +- 0.005)",
                 r.welfare.mean, r.welfare.ci_half_width, r.and_atom_frequency.mean);
  return o;
}

Verdict Criterion4() {
  Verdict o;
  const int m = 16;
  const double ratio = std::log2(m) / m;
  const AndOrEquilibrium eq(m, std::sqrt(ratio));
  const AndOrWelfareReport r = AndOrEquilibriumWelfare(eq, kTrials, kSeed + 1);
  const double bound = 3.0 * std::sqrt(ratio);
  const bool support_ok = !AndSupportSumCheck(eq.AndStrategy(), 1.0).has_value();
  o.pass = r.welfare.mean <= bound + r.welfare.ci_half_width && support_ok;
  o.payload = {{"v", eq.v()}, {"welfare", ToJson(r.welfare)}, {"support_ok", support_ok}};
  o.detail = Fmt("v %.4f, welfare %.4f <= %.4f + CI", eq.v(), r.welfare.mean, bound) +
             (support_ok ? "; support sums within 1" : "; support sum exceeds 1");
  return o;
}

Verdict Criterion5() {
  Verdict o;
  const SingleMindedInstance inst = GridInstance(3);
  const std::vector<Valuation> vals = inst.Valuations();
  const auto we = WalrasianSearch(vals);
  const Money opt = OptimalWelfare(vals).value;
  bool prices_one = we.has_value();
  Money we_welfare = 0.0;
  if (we) {
    for (Money p : we->prices) prices_one = prices_one && std::abs(p - 1.0) <= 1e-9;
    we_welfare = Welfare(vals, we->allocation);
  }
  const SingleMindedWelfareReport r = SingleMindedEquilibriumWelfare(inst, 3, 2, kTrials, kSeed);
  const bool satisfied_ok = r.satisfied.mean - r.satisfied.ci_half_width <= 2.0;
  // PoA lower end uses the upper CI end of welfare.
  const double poa_low = opt / r.welfare.hi();
  const double tolerance = 1.5 - opt / (2.0 * inst.value + inst.value * r.satisfied.ci_half_width);
  o.pass = prices_one && we_welfare == 9.0 && opt == 9.0 && satisfied_ok &&
           poa_low >= 1.5 - tolerance - 1e-12;
  o.payload = {{"prices_one", prices_one}, {"we_welfare", we_welfare}, {"opt", opt},
               {"satisfied", ToJson(r.satisfied)}};
  o.detail = Fmt("Walrasian welfare %.0f = OPT %.0f; satisfied %.4f", we_welfare, opt,
                 r.satisfied.mean) +
             Fmt(" +- %.4f (<= 2); PoA >= %.4f", r.satisfied.ci_half_width, poa_low);
  return o;
}

Verdict Criterion6() {
  Verdict o;
  Rng rng(kSeed);
  constexpr double kStep = 0.05;
  int agree = 0;
  int walrasian = 0;
  int welfare_ok = 0;
  int nash_without_walrasian = 0;
  std::vector<int> disagreements;
  for (int inst = 0; inst < 200; ++inst) {
    const int n = 1 + static_cast<int>(rng.Below(3));
    const int m = 1 + static_cast<int>(rng.Below(3));
    std::vector<Valuation> vals;
    for (int i = 0; i < n; ++i) {
      const uint32_t full = (1u << m) - 1u;
      std::vector<Money> t(full + 1, 0.0);
      for (uint32_t s = 1; s <= full; ++s) t[s] = 0.25 * static_cast<double>(rng.Below(9));
      for (uint32_t s = 1; s <= full; ++s) {
        for (int j = 0; j < m; ++j) {
          if (s >> j & 1u) t[s] = std::max(t[s], t[s & ~(1u << j)]);
        }
      }
      vals.push_back(Valuation::Table(m, std::move(t)));
    }
    const auto we = WalrasianSearch(vals);
    BidGrid grid;
    grid.step = kStep;
    grid.max = 2.0;
    const auto pne = PureNashSearchAnyPriority(vals, grid, 2.0 * m * kStep);
    if (we.has_value() == pne.has_value()) {
      ++agree;
    } else {
      disagreements.push_back(inst);
      nash_without_walrasian += pne.has_value();
    }
    if (we) {
      ++walrasian;
      welfare_ok += Welfare(vals, we->allocation) == OptimalWelfare(vals).value;
    }
    o.payload["instances"].push_back(
        {{"walrasian", we.has_value()}, {"pure_nash", pne.has_value()}});
  }
  o.pass = agree == 200 && welfare_ok == walrasian;
  o.payload["disagreements"] = disagreements;
  o.detail = Fmt("existence agrees on %.0f/200; Walrasian welfare = OPT on %.0f/%.0f", agree,
                 welfare_ok, walrasian) +
             Fmt("; grid equilibrium without Walrasian equilibrium in %.0f", nash_without_walrasian);
  return o;
}

Verdict Criterion7() {
  Verdict o;
  Rng rng(kSeed);
  int runs_ok = 0;
  constexpr int kRuns = 3;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int run = 0; run < kRuns; ++run) {
    Game g;
    for (int i = 0; i < 3; ++i) {
      std::vector<Money> w(3);
      for (auto& x : w) x = 0.25 * static_cast<double>(1 + rng.Below(4));
      g.valuations.push_back(Valuation::Additive(w));
    }
    g.rule = TieBreakingRule::ByIndex(3, 3);
    BidGrid grid;
    grid.step = 0.05;
    grid.max = 1.0;
    const FiniteGame fg = FiniteGame::Create(g, grid);
    NoRegretOptions opts;
    opts.rounds = 100000;
    opts.seed = kSeed + run;
    opts.record_rounds = false;
    const LearningTrace t = RunNoRegret(fg, opts);
    bool envelope = true;
    for (const PlayerLearning& p : t.players) {
      envelope = envelope && p.within_envelope() && p.realized_regret() <= p.envelope;
    }
    const CceWelfareReport w = CceWelfareRatio(fg, t);
    const bool bound = w.beta == 1.0 && w.xos.applicable && w.xos.holds;
    runs_ok += envelope && bound;
    worst_margin = std::min(worst_margin, w.xos.rhs - w.opt);
    Json regrets = Json::array();
    for (const PlayerLearning& p : t.players) {
      regrets.push_back({{"realized", p.realized_regret()}, {"expected", p.expected_regret()},
                         {"envelope", p.envelope}});
    }
    o.payload["runs"].push_back({{"opt", w.opt}, {"welfare", w.welfare}, {"slack", w.xos.slack},
                                 {"regrets", regrets}, {"envelope_ok", envelope}});
  }
  o.pass = runs_ok == kRuns;
  o.detail = Fmt("%.0f/%.0f runs within envelope with OPT <= 2 W + slack; min margin %.4f",
                 runs_ok, kRuns, worst_margin);
  return o;
}

Verdict Criterion8() {
  Verdict o;
  // Degenerate prior against the complete-information computation.
  Rng rng(kSeed);
  bool exact = true;
  for (int rep = 0; rep < 10; ++rep) {
    Game g;
    for (int i = 0; i < 2; ++i) {
      std::vector<Money> t = {0, 0.25 * rng.Below(5), 0.25 * rng.Below(5), 0};
      t[3] = std::max(t[1], t[2]) + 0.25 * rng.Below(5);
      g.valuations.push_back(Valuation::Table(2, t));
    }
    g.rule = TieBreakingRule::ByIndex(2, 2);
    BidGrid grid;
    grid.step = 0.25;
    grid.max = 2.0;
    std::vector<FiniteStrategy> s;
    for (int i = 0; i < 2; ++i) {
      s.push_back({{{0.25 * rng.Below(5), 0.25 * rng.Below(5)}, {0.25 * rng.Below(5), 0.0}},
                   {0.4, 0.6}});
    }
    const BayesGapReport b = BayesDeviationGap(FiniteBayesianGame::Degenerate(g), {{s[0]}, {s[1]}}, grid);
    MixedProfile mp;
    mp.strategies = {s[0], s[1]};
    for (int i = 0; i < 2; ++i) exact = exact && b.gaps[i].gap() == BestResponseGap(g, mp, i, grid).gap;
  }

  std::vector<std::vector<Valuation>> types = {
      {Valuation::Additive({1.0, 1.0}), Valuation::Additive({2.0, 1.5})},
      {Valuation::Additive({0.25, 0.25}), Valuation::Additive({0.5, 0.5})}};
  const FiniteBayesianGame bg = FiniteBayesianGame::Product(
      std::move(types), {{0.5, 0.5}, {0.25, 0.75}}, TieBreakingRule::ByIndex(2, 2));
  BidGrid grid;
  grid.step = 0.25;
  grid.max = 4.0;
  const BestResponseRun run = BayesBestResponseDynamics(bg, grid);
  const BayesGapReport gaps = BayesDeviationGap(bg, run.profile, grid);
  const BayesWelfareReport w = BayesWelfareBounds(bg, run.profile, grid, 0.0);
  o.pass = exact && run.converged && gaps.max_gap <= kTieTolerance && w.beta_checked &&
           w.beta == 1.0 && w.beta_holds && w.deviations_on_grid;
  o.payload = {{"degenerate_exact", exact}, {"max_gap", gaps.max_gap}, {"ratio", w.ratio},
               {"beta_rhs", w.beta_rhs}, {"opt", w.expected_opt}};
  o.detail = std::string("degenerate gaps exact: ") + (exact ? "yes" : "no") +
             Fmt("; product prior max gap %.3g; ratio %.4f <= 4 + slack (OPT %.4f)", gaps.max_gap,
                 w.ratio, w.expected_opt);
  return o;
}

}  // namespace
}  // namespace sfpa

int main() {
  using sfpa::Verdict;
  const std::vector<std::function<Verdict()>> criteria = {
      sfpa::Criterion1, sfpa::Criterion2, sfpa::Criterion3, sfpa::Criterion4,
      sfpa::Criterion5, sfpa::Criterion6, sfpa::Criterion7, sfpa::Criterion8};
  bool all = true;
  std::vector<std::string> first;
  for (size_t c = 0; c < criteria.size(); ++c) {
    Verdict o;
    try {
      o = criteria[c]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    first.push_back(o.payload.dump());
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", c + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  size_t same = 0;
  for (size_t c = 0; c < criteria.size(); ++c) {
    std::string again;
    try {
      again = criteria[c]().payload.dump();
    } catch (const std::exception&) {
      again = "exception";
    }
    same += again == first[c];
  }
  const bool determinism = same == criteria.size();
  all = all && determinism;
  std::printf("%s criterion 9: %zu/%zu payloads identical on rerun\n",
              determinism ? "PASS" : "FAIL", same, criteria.size());
  return all ? 0 : 1;
}
