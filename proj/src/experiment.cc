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

#include "sfpa/experiment.h"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sfpa/bayes.h"
#include "sfpa/dynamics.h"
#include "sfpa/equilibrium.h"

namespace sfpa {
namespace {

constexpr int kCdfPoints = 200;
constexpr int64_t kChunk = 1 << 16;
constexpr size_t kMaxListedEquilibria = 20;

// ---------------------------------------------------------------------------
// Game sources

struct SingleMindedSetup {
  SingleMindedInstance instance;
  int k = 2;
  int d = 2;
};

struct ResolvedGame {
  std::string name;  // builtin name or "file"
  Game game;
  std::optional<AndOrEquilibrium> andor;
  std::optional<SingleMindedSetup> single_minded;
  std::optional<Json> file;  // raw JSON for file sources
};

std::vector<std::string> SplitArgs(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    part.erase(0, part.find_first_not_of(' '));
    part.erase(part.find_last_not_of(' ') + 1);
    out.push_back(part);
  }
  return out;
}

double ParseDouble(const std::string& s, const char* what) {
  try {
    size_t used = 0;
    const double x = std::stod(s, &used);
    if (used == s.size()) return x;
  } catch (const std::exception&) {
  }
  Fail(ErrorKind::kUsage, std::string("cannot parse ") + what + " from \"" + s + "\"");
}

int ParseInt(const std::string& s, const char* what) {
  const double x = ParseDouble(s, what);
  if (x != std::floor(x) || std::abs(x) > 1e9) {
    Fail(ErrorKind::kUsage, std::string(what) + " must be an integer");
  }
  return static_cast<int>(x);
}

std::vector<int> AllPlayersOrder(int n, bool reverse) {
  std::vector<int> o(n);
  std::iota(o.begin(), o.end(), 0);
  if (reverse) std::reverse(o.begin(), o.end());
  return o;
}

TieBreakingRule MakeTieRule(const std::string& name, int n, int m) {
  if (name == "index") return TieBreakingRule::ByIndex(n, m);
  if (name == "reverse") return PriorityRule::Global(n, m, AllPlayersOrder(n, true));
  if (name == "random") {
    if (n > 6) Fail(ErrorKind::kPrecondition, "random tie rule supports at most 6 players");
    std::vector<int> order = AllPlayersOrder(n, false);
    std::vector<std::vector<int>> orders;
    do {
      orders.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    std::vector<WeightedRule> mixture;
    for (const auto& o : orders) {
      mixture.push_back({1.0 / static_cast<double>(orders.size()), PriorityRule::Global(n, m, o)});
    }
    return TieBreakingRule::Randomized(std::move(mixture));
  }
  std::vector<int> order;
  for (const std::string& p : SplitArgs(name)) order.push_back(ParseInt(p, "tie order"));
  if (static_cast<int>(order.size()) != n) {
    Fail(ErrorKind::kUsage, "tie rule must be index, reverse, random, or an order of all players");
  }
  return PriorityRule::Global(n, m, order);
}

SingleMindedInstance InstanceByName(const std::string& name, int k) {
  if (name == "triangle") return TriangleInstance();
  if (name == "grid") return GridInstance(k);
  return InstanceFromJson(ReadJsonFile(name));
}

ResolvedGame ResolveGame(const ExperimentSpec& spec) {
  std::string name = spec.game;
  std::vector<std::string> args;
  if (const size_t open = name.find('('); open != std::string::npos) {
    if (name.back() != ')') Fail(ErrorKind::kUsage, "malformed game \"" + name + "\"");
    args = SplitArgs(name.substr(open + 1, name.size() - open - 2));
    name = name.substr(0, open);
  }
  auto arg = [&](size_t q) -> const std::string* { return q < args.size() ? &args[q] : nullptr; };

  ResolvedGame r;
  r.name = name;
  if (name == "andor") {
    const int m = arg(0) ? ParseInt(*arg(0), "m") : spec.m;
    const double v = arg(1) ? ParseDouble(*arg(1), "v") : spec.v;
    r.andor.emplace(m, v);
    r.game = r.andor->MakeGame();
  } else if (name == "triangle" || name == "single_minded" || name == "grid") {
    SingleMindedSetup s;
    if (name == "triangle") {
      s.instance = TriangleInstance();
    } else if (name == "grid") {
      const int l = arg(0) ? ParseInt(*arg(0), "l") : spec.l;
      s.instance = GridInstance(l);
      s.k = l;
    } else {
      s.k = arg(0) ? ParseInt(*arg(0), "k") : spec.k;
      s.d = arg(1) ? ParseInt(*arg(1), "d") : spec.d;
      s.instance = InstanceByName(arg(2) ? *arg(2) : spec.instance, s.k);
    }
    s.instance.Validate(s.k, s.d);
    r.game.valuations = s.instance.Valuations();
    r.single_minded = std::move(s);
  } else if (name == "two_type_additive") {
    r.name = name;
  } else if (args.empty() && std::filesystem::exists(spec.game)) {
    r.name = "file";
    r.file = ReadJsonFile(spec.game);
    if (!r.file->contains("types")) r.game = GameFromJson(*r.file);
  } else {
    Fail(ErrorKind::kUsage, "unknown game \"" + spec.game +
                                "\" (andor, triangle, single_minded, grid, or a JSON file)");
  }
  if (!r.game.valuations.empty() && r.name != "file") {
    r.game.rule = MakeTieRule(spec.tie_rule, r.game.n(), r.game.m());
  }
  return r;
}

void RequireIndexTies(const ExperimentSpec& spec) {
  if (spec.tie_rule != "index") {
    Fail(ErrorKind::kUsage, "closed-form equilibria assume index-order ties");
  }
}

// Two players with two additive types each under a product prior.
FiniteBayesianGame TwoTypeAdditive() {
  std::vector<std::vector<Valuation>> types = {
      {Valuation::Additive({1.0, 1.0}), Valuation::Additive({2.0, 1.5})},
      {Valuation::Additive({0.25, 0.25}), Valuation::Additive({0.5, 0.5})}};
  return FiniteBayesianGame::Product(std::move(types), {{0.5, 0.5}, {0.25, 0.75}},
                                     TieBreakingRule::ByIndex(2, 2));
}

Money TopValue(const std::vector<Valuation>& vals) {
  Money top = 0.0;
  for (const Valuation& v : vals) top = std::max(top, v.Value(v.universe()));
  return top;
}

BidGrid FullGrid(double step, double max) {
  BidGrid g;
  g.step = step;
  g.max = max;
  g.Validate();
  return g;
}

// Grid top rounded up to a multiple of the step so the value itself is a level.
double GridTop(double step, double value) {
  return std::max(step, std::ceil(value / step - 1e-9) * step);
}

Json DeviationJson(const GapReport& g) {
  return {{"gap", Number(g.gap)},
          {"ci99_half_width", Number(g.ci_half_width)},
          {"analytic", g.analytic},
          {"exact", g.exact},
          {"equilibrium_utility", Number(g.equilibrium_utility)},
          {"best_deviation_utility", Number(g.best_deviation_utility)},
          {"best_deviation", g.best_deviation},
          {"deviations", g.deviations}};
}

// Monte Carlo utility of `player` when everybody samples its strategy.
Estimate MonteCarloUtility(const Game& game, const std::vector<MixedStrategy>& strategies,
                           int player, int64_t trials, uint64_t seed) {
  RunningStat total;
  BidProfile bids(game.n(), game.m());
  for (int64_t chunk = 0; chunk * kChunk < trials; ++chunk) {
    Rng rng(seed, static_cast<uint64_t>(chunk));
    const int64_t count = std::min(kChunk, trials - chunk * kChunk);
    RunningStat part;
    for (int64_t t = 0; t < count; ++t) {
      for (int i = 0; i < game.n(); ++i) SampleStrategy(strategies[i], rng, bids.row(i));
      part.Add(game.rule.deterministic()
                   ? PlayerUtility(game.valuations[player], bids, player, game.rule.priority())
                   : ExpectedPlayerUtility(game, bids, player));
    }
    total.Merge(part);
  }
  return total.ToEstimate();
}

void CdfSeries(const std::string& name, const AtomicCdf& cdf, std::vector<SeriesPoint>* out) {
  for (int q = 0; q < kCdfPoints; ++q) {
    const double x = cdf.lo() + (cdf.hi() - cdf.lo()) * q / (kCdfPoints - 1.0);
    out->push_back({name, x, cdf.Cdf(x)});
  }
}

double SampleKs(const AtomicCdf& cdf, const std::vector<double>& draws) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(draws.size());
  const double w = 1.0 / static_cast<double>(draws.size());
  for (double x : draws) pts.emplace_back(x, w);
  return KolmogorovSmirnov(
      std::move(pts), [&](double x) { return cdf.Cdf(x); },
      [&](double x) { return cdf.CdfBelow(x); });
}

// ---------------------------------------------------------------------------
// Commands

Json RunVerify(const ExperimentSpec& spec, const ResolvedGame& rg, Report*) {
  MixedProfile profile;
  std::vector<double> grid_max;
  std::vector<std::optional<Money>> analytic_utility;
  const Game& game = rg.game;
  const bool closed_form = spec.strategy.empty() || spec.strategy == rg.name;
  if (closed_form && rg.andor) {
    RequireIndexTies(spec);
    profile = MixedProfile::AndOr(*rg.andor);
    // Bids above the own value of the whole set are dominated by bidding 0.
    grid_max = {GridTop(spec.grid_step, 1.0), GridTop(spec.grid_step, rg.andor->v())};
    analytic_utility = {rg.andor->AndEquilibriumUtility(), rg.andor->OrEquilibriumUtility()};
  } else if (closed_form && rg.single_minded) {
    RequireIndexTies(spec);
    const SingleMindedSetup& s = *rg.single_minded;
    profile = MixedProfile::SingleMinded(s.instance, s.k, s.d);
    // The equilibrium support tops out at value / k and competitors have no
    // atom there, so higher bids only raise payments.
    grid_max.assign(game.n(), GridTop(spec.grid_step, s.instance.value / s.k));
    analytic_utility.assign(game.n(), 0.0);
  } else {
    if (spec.strategy.empty() || rg.name == "two_type_additive") {
      Fail(ErrorKind::kUsage, "verify needs --strategy with a JSON strategy file for this game");
    }
    const Json j = ReadJsonFile(spec.strategy);
    const Json& list = j.contains("strategies") ? j.at("strategies") : j;
    for (const Json& s : list) profile.strategies.push_back(FiniteStrategyFromJson(s, game.m()));
    if (static_cast<int>(profile.strategies.size()) != game.n()) {
      Fail(ErrorKind::kUsage, "strategy file needs one strategy per player");
    }
    for (const Valuation& v : game.valuations) {
      grid_max.push_back(GridTop(spec.grid_step, v.Value(v.universe())));
    }
    analytic_utility.assign(game.n(), std::nullopt);
  }

  Json players = Json::array();
  Money max_gap = -std::numeric_limits<double>::infinity();
  bool covers = true;
  for (int i = 0; i < game.n(); ++i) {
    const BidGrid grid = FullGrid(spec.grid_step, grid_max[i]);
    const GapReport g = BestResponseGap(game, profile, i, grid, spec.trials, spec.seed);
    Json p = DeviationJson(g);
    p["player"] = i;
    p["grid_max"] = grid.max;
    max_gap = std::max(max_gap, g.gap);
    if (analytic_utility[i]) {
      const Estimate mc = MonteCarloUtility(game, profile.strategies, i, spec.trials,
                                            spec.seed + 1 + static_cast<uint64_t>(i));
      const bool ok = mc.Covers(*analytic_utility[i]);
      covers = covers && ok;
      p["monte_carlo_utility"] = ToJson(mc);
      p["analytic_utility"] = Number(*analytic_utility[i]);
      p["monte_carlo_covers_analytic"] = ok;
    }
    players.push_back(std::move(p));
  }
  return {{"players", players},
          {"max_gap", Number(max_gap)},
          {"tolerance", spec.tolerance},
          {"ok", max_gap <= spec.tolerance && covers}};
}

Json RunWalrasian(const ResolvedGame& rg) {
  const std::vector<Valuation>& vals = rg.game.valuations;
  const auto we = WalrasianSearch(vals);
  const WelfareOptimum opt = OptimalWelfare(vals);
  Json r = {{"exists", we.has_value()}, {"optimal_welfare", opt.value}};
  if (we) {
    r["allocation"] = ToJson(we->allocation);
    r["prices"] = we->prices;
    r["welfare"] = Welfare(vals, we->allocation);
    r["check_ok"] = !WalrasianCheck(vals, *we).has_value();
  } else {
    r["optimal_allocation"] = ToJson(opt.allocation);
  }
  return r;
}

Json RunPureNash(const ExperimentSpec& spec, const ResolvedGame& rg) {
  const Game& game = rg.game;
  const BidGrid grid = FullGrid(spec.grid_step, GridTop(spec.grid_step, TopValue(game.valuations)));
  const PureNashResult r = PureNashSearch(game, grid, spec.tolerance);
  Json eqs = Json::array();
  for (size_t e = 0; e < r.equilibria.size() && e < kMaxListedEquilibria; ++e) {
    eqs.push_back({{"bids", ToJson(r.equilibria[e])}, {"max_gain", Number(r.max_gains[e])}});
  }
  Json out = {{"grid_step", grid.step},
              {"grid_max", grid.max},
              {"epsilon", spec.tolerance},
              {"profiles_examined", r.profiles_examined},
              {"equilibria_found", r.equilibria.size()},
              {"equilibria", eqs}};
  const auto any = PureNashSearchAnyPriority(game.valuations, grid, spec.tolerance);
  Json a = {{"exists", any.has_value()}};
  if (any) {
    a["allocation"] = ToJson(any->allocation);
    a["prices"] = any->prices;
    a["orders"] = any->rule.orders();
    a["max_gain"] = Number(any->max_gain);
  }
  out["some_priority_rule"] = a;
  out["walrasian_exists"] = WalrasianSearch(game.valuations).has_value();
  return out;
}

Json RunPoa(const ExperimentSpec& spec, const ResolvedGame& rg, Report* report) {
  if (rg.andor) {
    RequireIndexTies(spec);
    const AndOrEquilibrium& eq = *rg.andor;
    const AndOrWelfareReport w = AndOrEquilibriumWelfare(eq, spec.trials, spec.seed);
    const double opt = std::max(1.0, eq.v());
    const double m = eq.m();
    for (int sweep_m : {4, 9, 16, 25}) {
      const AndOrEquilibrium s(sweep_m, 1.0 / std::sqrt(sweep_m));
      report->series.push_back(
          {"welfare_vs_m", static_cast<double>(sweep_m),
           AndOrEquilibriumWelfare(s, spec.trials, spec.seed).welfare.mean});
    }
    return {{"welfare", ToJson(w.welfare)},
            {"optimal_welfare", opt},
            {"ratio", Number(opt / w.welfare.mean)},
            {"and_atom_frequency", ToJson(w.and_atom_frequency)},
            {"analytic_atom_mass", w.analytic_atom_mass},
            {"and_win_frequency", ToJson(w.and_win_frequency)},
            {"revenue", ToJson(w.revenue)},
            {"two_over_sqrt_m", 2.0 / std::sqrt(m)},
            {"three_sqrt_log2_m_over_m", 3.0 * std::sqrt(std::log2(m) / m)},
            {"and_support_sum_ok", !AndSupportSumCheck(eq.AndStrategy(), 1.0).has_value()},
            {"seed", w.seed}};
  }
  if (rg.single_minded) {
    RequireIndexTies(spec);
    const SingleMindedSetup& s = *rg.single_minded;
    const SingleMindedWelfareReport w =
        SingleMindedEquilibriumWelfare(s.instance, s.k, s.d, spec.trials, spec.seed);
    const WelfareOptimum opt = OptimalWelfare(rg.game.valuations);
    Json r = {{"welfare", ToJson(w.welfare)},
              {"satisfied_players", ToJson(w.satisfied)},
              {"optimal_welfare", opt.value},
              {"ratio", Number(opt.value / w.welfare.mean)},
              {"ratio_ci_low", Number(opt.value / w.welfare.hi())},
              {"seed", w.seed}};
    if (s.instance.m <= 12) {
      const auto we = WalrasianSearch(rg.game.valuations);
      r["walrasian_exists"] = we.has_value();
      if (we) {
        r["walrasian_welfare"] = Welfare(rg.game.valuations, we->allocation);
        r["walrasian_prices"] = we->prices;
      }
    }
    return r;
  }
  Fail(ErrorKind::kUsage, "poa needs a builtin with a closed-form equilibrium; use dynamics");
}

Json BoundJson(const BoundCheck& b) {
  return {{"applicable", b.applicable}, {"holds", b.holds}, {"rhs", Number(b.rhs)},
          {"slack", Number(b.slack)},   {"note", b.note}};
}

Json RunDynamics(const ExperimentSpec& spec, const ResolvedGame& rg, Report* report) {
  const Game& game = rg.game;
  std::vector<BidGrid> grids;
  for (const Valuation& v : game.valuations) {
    BidGrid g = FullGrid(spec.grid_step, GridTop(spec.grid_step, v.Value(v.universe())));
    grids.push_back(g);
  }
  if (rg.andor) {
    // AND bids one level on all items, OR bids on a single item.
    grids[AndOrEquilibrium::kAndPlayer].family = GridFamily::kBundleUniform;
    grids[AndOrEquilibrium::kOrPlayer].family = GridFamily::kSingleItem;
  }
  const FiniteGame fg = FiniteGame::Create(game, grids);
  NoRegretOptions options;
  options.rounds = spec.rounds;
  options.seed = spec.seed;
  const LearningTrace trace = RunNoRegret(fg, options);
  if (!spec.trace.empty()) {
    std::ofstream out(spec.trace);
    if (!out) Fail(ErrorKind::kUsage, "cannot write " + spec.trace);
    WriteTraceCsv(trace, out);
  }

  Json players = Json::array();
  for (int i = 0; i < fg.n(); ++i) {
    const PlayerLearning& p = trace.players[i];
    players.push_back({{"player", i},
                       {"actions", p.actions},
                       {"payoff_range", {p.payoff_lo, p.payoff_hi}},
                       {"realized_regret", Number(p.realized_regret())},
                       {"expected_regret", Number(p.expected_regret())},
                       {"envelope", Number(p.envelope)},
                       {"within_envelope", p.within_envelope()}});
    for (int64_t t = 0; t < trace.rounds; ++t) {
      report->series.push_back({"regret_player_" + std::to_string(i), static_cast<double>(t + 1),
                                trace.regrets[static_cast<size_t>(t) * trace.n + i]});
    }
  }
  const CceCheck cce = VerifyCce(fg, trace);
  const CceWelfareReport w = CceWelfareRatio(fg, trace);
  Json r = {{"players", players},
            {"factorized", fg.factorized()},
            {"mean_welfare", trace.mean_welfare},
            {"mean_revenue", trace.mean_revenue},
            {"cce", {{"gains", cce.gains}, {"allowed", cce.allowed}, {"ok", cce.ok}}},
            {"welfare_ratio",
             {{"optimal_welfare", w.opt},
              {"welfare", w.welfare},
              {"ratio", Number(w.ratio)},
              {"beta", Number(w.beta)},
              {"epsilons", w.epsilons},
              {"xos_bound", BoundJson(w.xos)},
              {"general_bound", BoundJson(w.general)}}},
            {"seed", spec.seed}};
  if (rg.andor) {
    auto first = [](const BidVector& b) { return b[0]; };
    auto top = [](const BidVector& b) { return *std::max_element(b.begin(), b.end()); };
    r["ks_and_marginal"] = MarginalKs(fg, trace, 0, first, rg.andor->and_cdf());
    r["ks_or_marginal"] = MarginalKs(fg, trace, 1, top, rg.andor->or_cdf());
  }
  return r;
}

Json RunBayes(const ExperimentSpec& spec, const ResolvedGame& rg) {
  FiniteBayesianGame bg;
  std::optional<BayesProfile> profile;
  if (rg.name == "two_type_additive") {
    bg = TwoTypeAdditive();
  } else if (rg.file && rg.file->contains("types")) {
    bg = BayesGameFromJson(*rg.file);
    if (rg.file->contains("strategies")) profile = BayesProfileFromJson(rg.file->at("strategies"), bg);
  } else {
    bg = FiniteBayesianGame::Degenerate(rg.game);
  }
  Money top = 0.0;
  for (const auto& t : bg.types) top = std::max(top, TopValue(t));
  const BidGrid grid = FullGrid(spec.grid_step, GridTop(spec.grid_step, top));
  Json r;
  if (!profile) {
    const BestResponseRun run = BayesBestResponseDynamics(bg, grid);
    profile = run.profile;
    r["strategies_source"] = "best_response_dynamics";
    r["converged"] = run.converged;
    r["sweeps"] = run.sweeps;
  } else {
    r["strategies_source"] = "file";
  }
  const BayesGapReport gaps = BayesDeviationGap(bg, *profile, grid);
  Json gl = Json::array();
  for (const TypeGap& g : gaps.gaps) {
    gl.push_back({{"player", g.player},
                  {"type", g.type},
                  {"type_probability", g.type_probability},
                  {"equilibrium_utility", Number(g.equilibrium_utility)},
                  {"best_utility", Number(g.best_utility)},
                  {"best_deviation", g.best_deviation},
                  {"gap", Number(g.gap())}});
  }
  const BayesWelfareReport w = BayesWelfareBounds(bg, *profile, grid, spec.tolerance);
  Json strategies = Json::array();
  for (const auto& player : *profile) {
    Json per_type = Json::array();
    for (const FiniteStrategy& s : player) per_type.push_back(ToJson(s));
    strategies.push_back(per_type);
  }
  r["grid_step"] = grid.step;
  r["grid_max"] = grid.max;
  r["gaps"] = gl;
  r["max_gap"] = Number(gaps.max_gap);
  r["strategies"] = strategies;
  r["welfare"] = {{"expected_opt", w.expected_opt},
                  {"expected_welfare", w.expected_welfare},
                  {"ratio", Number(w.ratio)},
                  {"epsilon", w.epsilon},
                  {"gap_precondition_ok", w.gap_precondition_ok},
                  {"deviations_on_grid", w.deviations_on_grid},
                  {"beta", Number(w.beta)},
                  {"general_holds", w.general_holds},
                  {"general_rhs", Number(w.general_rhs)},
                  {"beta_checked", w.beta_checked},
                  {"beta_holds", w.beta_holds},
                  {"beta_rhs", Number(w.beta_rhs)},
                  {"note", w.note}};
  return r;
}

Json RunSample(const ExperimentSpec& spec, const ResolvedGame& rg, Report* report) {
  struct Marginal {
    std::string name;
    const AtomicCdf* cdf;
    int player;
  };
  std::vector<Marginal> marginals;
  std::vector<MixedStrategy> strategies;
  std::optional<SingleMindedSymmetric> sm;
  if (rg.andor) {
    marginals = {{"and_cdf", &rg.andor->and_cdf(), 0}, {"or_cdf", &rg.andor->or_cdf(), 1}};
    strategies = {rg.andor->AndStrategy(), rg.andor->OrStrategy()};
  } else if (rg.single_minded) {
    const SingleMindedSetup& s = *rg.single_minded;
    sm.emplace(s.k, s.d, s.instance.value);
    marginals = {{"bid_cdf", &sm->cdf(), 0}};
    for (int i = 0; i < s.instance.n(); ++i) strategies.push_back(sm->Strategy(s.instance, i));
  } else {
    Fail(ErrorKind::kUsage, "sample needs a builtin with a closed-form equilibrium");
  }
  Json out = Json::array();
  const int m = rg.game.m();
  for (const Marginal& mg : marginals) {
    std::vector<double> draws;
    draws.reserve(static_cast<size_t>(spec.trials));
    std::vector<Money> bid(m);
    RunningStat mean;
    for (int64_t chunk = 0; chunk * kChunk < spec.trials; ++chunk) {
      Rng rng(spec.seed, static_cast<uint64_t>(mg.player) << 32 | static_cast<uint64_t>(chunk));
      const int64_t count = std::min(kChunk, spec.trials - chunk * kChunk);
      for (int64_t t = 0; t < count; ++t) {
        SampleStrategy(strategies[mg.player], rng, bid);
        const double x = *std::max_element(bid.begin(), bid.end());
        draws.push_back(x);
        mean.Add(x);
      }
    }
    double atom = 0.0;
    for (double x : draws) atom += x == 0.0;
    out.push_back({{"series", mg.name},
                   {"player", mg.player},
                   {"ks_distance", SampleKs(*mg.cdf, draws)},
                   {"mean_bid", ToJson(mean.ToEstimate())},
                   {"zero_frequency", atom / static_cast<double>(draws.size())},
                   {"analytic_zero_mass", mg.cdf->AtomMass(0.0)}});
    CdfSeries(mg.name, *mg.cdf, &report->series);
  }
  return {{"marginals", out}, {"samples", spec.trials}, {"seed", spec.seed}};
}

std::string ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kInternal: return "internal";
  }
  return "internal";
}

}  // namespace

Json ExperimentSpec::ToJson() const {
  return {{"command", command},     {"game", game},
          {"strategy", strategy},   {"m", m},
          {"v", v},                 {"k", k},
          {"d", d},                 {"l", l},
          {"instance", instance},   {"grid_step", grid_step},
          {"trials", trials},       {"rounds", rounds},
          {"seed", seed},           {"tolerance", tolerance},
          {"tie_rule", tie_rule},   {"format", format}};
}

ExperimentSpec ExperimentSpec::FromJson(const Json& j, ExperimentSpec base) {
  if (!j.is_object()) Fail(ErrorKind::kUsage, "config must be a JSON object");
  static const std::vector<std::string> kKeys = {
      "command", "game",  "strategy", "m",         "v",        "k",      "d",     "l",
      "instance", "grid_step", "trials", "rounds", "seed", "tolerance", "tie_rule", "out",
      "format",  "trace"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      Fail(ErrorKind::kUsage, "unknown config key \"" + key + "\"");
    }
  }
  try {
    base.command = j.value("command", base.command);
    base.game = j.value("game", base.game);
    base.strategy = j.value("strategy", base.strategy);
    base.m = j.value("m", base.m);
    base.v = j.value("v", base.v);
    base.k = j.value("k", base.k);
    base.d = j.value("d", base.d);
    base.l = j.value("l", base.l);
    base.instance = j.value("instance", base.instance);
    base.grid_step = j.value("grid_step", base.grid_step);
    base.trials = j.value("trials", base.trials);
    base.rounds = j.value("rounds", base.rounds);
    base.seed = j.value("seed", base.seed);
    base.tolerance = j.value("tolerance", base.tolerance);
    base.tie_rule = j.value("tie_rule", base.tie_rule);
    base.out = j.value("out", base.out);
    base.format = j.value("format", base.format);
    base.trace = j.value("trace", base.trace);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kUsage, std::string("bad config value: ") + e.what());
  }
  return base;
}

void ExperimentSpec::Validate() const {
  static const std::vector<std::string> kCommands = {"verify",   "walrasian", "pure-nash", "poa",
                                                     "dynamics", "bayes",     "sample"};
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    Fail(ErrorKind::kUsage, "unknown command \"" + command + "\"");
  }
  if (m <= 0 || k <= 0 || d <= 0 || l <= 0) {
    Fail(ErrorKind::kUsage, "m, k, d, and l must be positive");
  }
  if (!(v > 0) || !(grid_step > 0) || !(tolerance > 0) || !std::isfinite(v) ||
      !std::isfinite(grid_step) || !std::isfinite(tolerance)) {
    Fail(ErrorKind::kUsage, "v, grid step, and tolerance must be positive and finite");
  }
  if (trials <= 0 || rounds <= 0) Fail(ErrorKind::kUsage, "trials and rounds must be positive");
  if (format != "json" && format != "csv") Fail(ErrorKind::kUsage, "format must be json or csv");
}

std::string Report::Body() const {
  Json j = ToJson();
  j.erase("wall_clock_seconds");
  return j.dump(2);
}

Json Report::ToJson() const {
  Json j;
  j["version"] = kVersion;
  j["spec"] = spec;
  if (error) {
    j["error"] = *error;
  } else {
    j["results"] = results;
    j["series_points"] = series.size();
  }
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

Report RunExperiment(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.spec = spec.ToJson();
  try {
    spec.Validate();
    const ResolvedGame rg = ResolveGame(spec);
    if (spec.command == "bayes") {
      report.results = RunBayes(spec, rg);
    } else {
      if (rg.game.valuations.empty()) {
        Fail(ErrorKind::kUsage, "command \"" + spec.command + "\" needs a complete-information game");
      }
      if (spec.command == "verify") report.results = RunVerify(spec, rg, &report);
      if (spec.command == "walrasian") report.results = RunWalrasian(rg);
      if (spec.command == "pure-nash") report.results = RunPureNash(spec, rg);
      if (spec.command == "poa") report.results = RunPoa(spec, rg, &report);
      if (spec.command == "dynamics") report.results = RunDynamics(spec, rg, &report);
      if (spec.command == "sample") report.results = RunSample(spec, rg, &report);
    }
  } catch (const Error& e) {
    report.error = Json{{"kind", ErrorKindName(e.kind())}, {"message", e.what()}};
    report.series.clear();
  } catch (const std::exception& e) {
    report.error = Json{{"kind", "internal"}, {"message", e.what()}};
    report.series.clear();
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

int ExitCode(const Report& report) {
  if (!report.error) return 0;
  const std::string kind = report.error->at("kind");
  if (kind == "usage") return 1;
  if (kind == "precondition") return 2;
  return 3;
}

void WritePlotCsv(const Report& report, std::ostream& out) {
  out << "series,x,y\n";
  char buf[64];
  for (const SeriesPoint& p : report.series) {
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", p.x, p.y);
    out << p.series << buf;
  }
}

}  // namespace sfpa
