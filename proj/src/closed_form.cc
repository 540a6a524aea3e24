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

#include "sfpa/closed_form.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sfpa {

// ---------------------------------------------------------------------------
// AtomicCdf

AtomicCdf AtomicCdf::Create(double lo, double hi, std::function<double(double)> cdf,
                            std::vector<Atom> atoms,
                            std::function<double(double)> quantile) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    Fail(ErrorKind::kUsage, "CDF domain must satisfy lo <= hi");
  }
  if (!cdf) Fail(ErrorKind::kUsage, "CDF function missing");
  double atom_total = 0.0;
  for (const Atom& a : atoms) {
    if (a.mass < 0 || a.point < lo || a.point > hi) {
      Fail(ErrorKind::kUsage, "CDF atom outside domain or with negative mass");
    }
    atom_total += a.mass;
  }
  if (atom_total > 1.0 + kProbTolerance) Fail(ErrorKind::kUsage, "CDF atoms exceed mass 1");
  if (std::abs(cdf(hi) - 1.0) > kProbTolerance) {
    Fail(ErrorKind::kUsage, "CDF does not reach 1 at the top of its domain");
  }
  constexpr int kProbes = 1024;
  double prev = cdf(lo);
  if (prev < -kProbTolerance) Fail(ErrorKind::kUsage, "CDF is negative");
  for (const Atom& a : atoms) {
    if (a.point == lo && prev < a.mass - kProbTolerance) {
      Fail(ErrorKind::kUsage, "CDF at lo is below its atom mass");
    }
  }
  for (int k = 1; k <= kProbes; ++k) {
    const double x = lo + (hi - lo) * k / kProbes;
    const double f = cdf(x);
    if (f < prev - kProbTolerance) Fail(ErrorKind::kUsage, "CDF is not nondecreasing");
    prev = f;
  }
  AtomicCdf out;
  out.lo_ = lo;
  out.hi_ = hi;
  out.cdf_ = std::move(cdf);
  out.atoms_ = std::move(atoms);
  out.quantile_ = std::move(quantile);
  return out;
}

double AtomicCdf::Cdf(double x) const {
  if (x < lo_) return 0.0;
  if (x >= hi_) return 1.0;
  return std::clamp(cdf_(x), 0.0, 1.0);
}

double AtomicCdf::AtomMass(double x) const {
  double mass = 0.0;
  for (const Atom& a : atoms_) {
    if (std::abs(a.point - x) <= 1e-15) mass += a.mass;
  }
  return mass;
}

double AtomicCdf::CdfBelow(double x) const {
  if (x <= lo_) return x < lo_ ? 0.0 : std::max(0.0, Cdf(lo_) - AtomMass(lo_));
  if (x > hi_) return 1.0;
  return std::max(0.0, Cdf(x) - AtomMass(x));
}

double AtomicCdf::Quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (quantile_) return std::clamp(quantile_(u), lo_, hi_);
  if (u <= Cdf(lo_)) return lo_;
  double a = lo_;
  double b = hi_;
  for (int it = 0; it < 200 && b - a > 0; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (Cdf(mid) >= u) {
      b = mid;
    } else {
      a = mid;
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// AND-OR

namespace {

AtomicCdf MakeAndCdf(int m, double v) {
  const double a = 1.0 / m;
  if (v <= a * (1.0 + 1e-15)) {
    // F collapses onto a single atom at 1/m.
    return AtomicCdf::Create(
        0.0, a, [a](double y) { return y >= a ? 1.0 : 0.0; }, {{a, 1.0}},
        [a](double) { return a; });
  }
  const double atom = 1.0 - a / v;
  return AtomicCdf::Create(
      0.0, a, [v, a](double y) { return (v - a) / (v - y); }, {{0.0, atom}},
      [v, a, atom](double u) { return u <= atom ? 0.0 : v - (v - a) / u; });
}

AtomicCdf MakeOrCdf(int m) {
  const double a = 1.0 / m;
  const double mm1 = m - 1.0;
  return AtomicCdf::Create(
      0.0, a, [mm1](double x) { return mm1 * x / (1.0 - x); }, {},
      [mm1](double u) { return u / (mm1 + u); });
}

}  // namespace

AndOrEquilibrium::AndOrEquilibrium(int m, double v)
    : m_(m), v_(v), and_cdf_(), or_cdf_() {
  if (m < 2 || m > kMaxStructuredItems) {
    Fail(ErrorKind::kPrecondition, "AND-OR equilibrium needs 2 <= m <= 31");
  }
  if (!std::isfinite(v) || v < 1.0 / m * (1.0 - 1e-12)) {
    Fail(ErrorKind::kPrecondition, "AND-OR equilibrium needs v >= 1/m");
  }
  and_cdf_ = MakeAndCdf(m, v);
  or_cdf_ = MakeOrCdf(m);
}

Game AndOrEquilibrium::MakeGame() const {
  Game g;
  g.valuations = {Valuation::And(m_, 1.0), Valuation::Or(m_, v_)};
  g.rule = TieBreakingRule::ByIndex(2, m_);  // AND is player 0
  return g;
}

Evaluated AndOrEquilibrium::AndUtility(std::span<const Money> x) const {
  const double inv_m = 1.0 / m_;
  Evaluated out;
  for (Money xi : x) {
    if (xi < 0 || xi > inv_m) out.out_of_domain = true;
    // The OR bid lands on this item with probability 1/m; on the others the
    // OR bid is 0 and the AND bidder wins the tie.
    const double g = or_cdf_.Cdf(xi);
    out.value += g * inv_m - xi * ((m_ - 1) * inv_m + g * inv_m);
  }
  return out;
}

Evaluated AndOrEquilibrium::OrUtility(std::span<const Money> x) const {
  Evaluated out;
  Money top = 0.0;
  Money paid = 0.0;
  for (Money xi : x) {
    if (xi < 0 || xi > 1.0 / m_) out.out_of_domain = true;
    top = std::max(top, xi);
    paid += xi * and_cdf_.CdfBelow(xi);
  }
  out.value = v_ * and_cdf_.CdfBelow(top) - paid;
  return out;
}

AndOrEquilibrium::GridGap AndOrEquilibrium::AndGridGap(const BidGrid& grid) const {
  GridGap out;
  Money best_level = 0.0;
  Money best_h = AndUtility(std::vector<Money>{0.0}).value;
  for (Money level : grid.Levels()) {
    const Money h = AndUtility(std::vector<Money>{level}).value;
    if (h > best_h) {
      best_h = h;
      best_level = level;
    }
  }
  out.best_deviation.assign(m_, best_level);
  out.best_utility = AndUtility(out.best_deviation).value;
  out.gap = out.best_utility - AndEquilibriumUtility();
  return out;
}

AndOrEquilibrium::GridGap AndOrEquilibrium::OrGridGap(const BidGrid& grid) const {
  GridGap out;
  BidVector bid(m_, 0.0);
  out.best_deviation = bid;
  out.best_utility = OrUtility(bid).value;
  for (Money level : grid.Levels()) {
    bid[0] = level;
    const Money u = OrUtility(bid).value;
    if (u > out.best_utility) {
      out.best_utility = u;
      out.best_deviation = bid;
    }
  }
  out.gap = out.best_utility - OrEquilibriumUtility();
  return out;
}

void AndOrEquilibrium::SampleAndBid(Rng& rng, std::span<Money> out) const {
  std::fill(out.begin(), out.end(), and_cdf_.Sample(rng));
}

void AndOrEquilibrium::SampleOrBid(Rng& rng, std::span<Money> out) const {
  const Money x = or_cdf_.Sample(rng);
  std::fill(out.begin(), out.end(), 0.0);
  out[rng.Below(m_)] = x;
}

SampledStrategy AndOrEquilibrium::AndStrategy() const {
  SampledStrategy s;
  s.name = "andor.and";
  AndOrEquilibrium copy = *this;
  s.sample = [copy](Rng& rng, std::span<Money> out) { copy.SampleAndBid(rng, out); };
  s.support_max_sum = m_ * and_cdf_.hi();
  return s;
}

SampledStrategy AndOrEquilibrium::OrStrategy() const {
  SampledStrategy s;
  s.name = "andor.or";
  AndOrEquilibrium copy = *this;
  s.sample = [copy](Rng& rng, std::span<Money> out) { copy.SampleOrBid(rng, out); };
  s.support_max_sum = or_cdf_.hi();
  return s;
}

AndOrWelfareReport AndOrEquilibriumWelfare(const AndOrEquilibrium& eq,
                                           int64_t trials, uint64_t seed) {
  if (trials <= 0) Fail(ErrorKind::kUsage, "trials must be positive");
  constexpr int64_t kChunk = 1 << 16;
  const int m = eq.m();
  const Game game = eq.MakeGame();
  const PriorityRule& rule = game.rule.priority();
  RunningStat welfare, atom, win, revenue;
  BidProfile bids(2, m);
  for (int64_t chunk = 0; chunk * kChunk < trials; ++chunk) {
    Rng rng(seed, static_cast<uint64_t>(chunk));
    const int64_t count = std::min(kChunk, trials - chunk * kChunk);
    RunningStat cw, ca, cwin, crev;
    for (int64_t t = 0; t < count; ++t) {
      eq.SampleAndBid(rng, bids.row(AndOrEquilibrium::kAndPlayer));
      eq.SampleOrBid(rng, bids.row(AndOrEquilibrium::kOrPlayer));
      uint32_t masks[2] = {0, 0};
      Money rev = 0.0;
      for (int j = 0; j < m; ++j) {
        const int w = WinnerOf(bids, j, rule);
        masks[w] |= 1u << j;
        rev += bids.at(w, j);
      }
      const Money w = game.valuations[0].Value(ItemSet(masks[0])) +
                      game.valuations[1].Value(ItemSet(masks[1]));
      cw.Add(w);
      ca.Add(bids.at(AndOrEquilibrium::kAndPlayer, 0) == 0.0 ? 1.0 : 0.0);
      cwin.Add(masks[0] == ItemSet::Full(m).bits() ? 1.0 : 0.0);
      crev.Add(rev);
    }
    welfare.Merge(cw);
    atom.Merge(ca);
    win.Merge(cwin);
    revenue.Merge(crev);
  }
  AndOrWelfareReport r;
  r.welfare = welfare.ToEstimate();
  r.and_atom_frequency = atom.ToEstimate();
  r.and_win_frequency = win.ToEstimate();
  r.revenue = revenue.ToEstimate();
  r.analytic_atom_mass = eq.AndAtomMass();
  r.seed = seed;
  return r;
}

// ---------------------------------------------------------------------------
// Triangle and single-minded

Evaluated TriangleUtility(Money y, Money z) {
  Evaluated out;
  out.out_of_domain = y < 0 || y > 0.5 || z < 0 || z > 0.5;
  out.value = -2.0 * (y - z) * (y - z);
  return out;
}

AtomicCdf TriangleCdf() {
  return AtomicCdf::Create(
      0.0, 0.5, [](double x) { return 2.0 * x; }, {}, [](double u) { return 0.5 * u; });
}

std::vector<Valuation> SingleMindedInstance::Valuations() const {
  std::vector<Valuation> out;
  out.reserve(bundles.size());
  for (ItemSet b : bundles) out.push_back(Valuation::SingleMinded(m, b, value));
  return out;
}

void SingleMindedInstance::Validate(int k, int d) const {
  const ItemSet universe = ItemSet::Full(m);
  std::vector<int> demand(m, 0);
  for (size_t i = 0; i < bundles.size(); ++i) {
    if (!bundles[i].IsSubsetOf(universe)) {
      Fail(ErrorKind::kUsage, "bundle outside item universe");
    }
    if (bundles[i].size() != k) {
      Fail(ErrorKind::kUsage, "bundle " + std::to_string(i) + " does not have k items");
    }
    for (int j : bundles[i].Indices()) ++demand[j];
    for (size_t q = i + 1; q < bundles.size(); ++q) {
      if ((bundles[i] & bundles[q]).size() > 1) {
        Fail(ErrorKind::kUsage, "bundles share more than one item");
      }
    }
  }
  for (int j = 0; j < m; ++j) {
    if (demand[j] != d) {
      Fail(ErrorKind::kUsage, "item " + std::to_string(j) + " is not wanted by exactly d bidders");
    }
  }
}

std::vector<int> SingleMindedInstance::Competitors(int player, int item) const {
  std::vector<int> out;
  for (int i = 0; i < n(); ++i) {
    if (i != player && bundles[i].Contains(item)) out.push_back(i);
  }
  return out;
}

SingleMindedInstance TriangleInstance() {
  SingleMindedInstance inst;
  inst.m = 3;
  inst.value = 1.0;
  inst.bundles = {ItemSet::FromIndices({0, 1}), ItemSet::FromIndices({1, 2}),
                  ItemSet::FromIndices({2, 0})};
  return inst;
}

SingleMindedInstance GridInstance(int l) {
  if (l < 2 || l * l > kMaxItems) {
    Fail(ErrorKind::kPrecondition, "grid game needs 2 <= l and l^2 <= 20");
  }
  SingleMindedInstance inst;
  inst.m = l * l;
  inst.value = l;
  for (int r = 0; r < l; ++r) {
    std::vector<int> items;
    for (int c = 0; c < l; ++c) items.push_back(r * l + c);
    inst.bundles.push_back(ItemSet::FromIndices(items));
  }
  for (int c = 0; c < l; ++c) {
    std::vector<int> items;
    for (int r = 0; r < l; ++r) items.push_back(r * l + c);
    inst.bundles.push_back(ItemSet::FromIndices(items));
  }
  return inst;
}

SingleMindedSymmetric::SingleMindedSymmetric(int k, int d, Money value)
    : k_(k), d_(d), value_(value) {
  if (k < 2) Fail(ErrorKind::kUsage, "single-minded equilibrium needs k >= 2");
  if (d < 2) Fail(ErrorKind::kUsage, "single-minded equilibrium needs d >= 2");
  if (!(value > 0)) Fail(ErrorKind::kUsage, "single-minded value must be positive");
  const double hi = value / k;
  const double exponent = 1.0 / ((d - 1.0) * (k - 1.0));
  const double inverse = (d - 1.0) * (k - 1.0);
  cdf_ = AtomicCdf::Create(
      0.0, hi,
      [k, value, exponent](double x) { return std::pow(k * x / value, exponent); }, {},
      [k, value, inverse](double u) { return value * std::pow(u, inverse) / k; });
}

Evaluated SingleMindedSymmetric::Utility(std::span<const Money> x) const {
  if (static_cast<int>(x.size()) != k_) {
    Fail(ErrorKind::kUsage, "single-minded utility needs k bids");
  }
  Evaluated out;
  const double hi = value_ / k_;
  const double exponent = 1.0 / (k_ - 1.0);
  double product = 1.0;
  double paid = 0.0;
  for (Money xj : x) {
    if (xj < 0 || xj > hi) out.out_of_domain = true;
    const double win = xj >= hi ? 1.0 : std::pow(k_ * std::max(0.0, xj) / value_, exponent);
    product *= win;
    paid += xj * win;
  }
  out.value = value_ * product - paid;
  return out;
}

SampledStrategy SingleMindedSymmetric::Strategy(const SingleMindedInstance& instance,
                                                int player) const {
  SampledStrategy s;
  s.name = "single_minded";
  const AtomicCdf cdf = cdf_;
  const std::vector<int> items = instance.bundles.at(player).Indices();
  s.sample = [cdf, items](Rng& rng, std::span<Money> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const Money x = cdf.Sample(rng);
    for (int j : items) out[j] = x;
  };
  s.support_max_sum = static_cast<double>(items.size()) * cdf_.hi();
  return s;
}

SingleMindedWelfareReport SingleMindedEquilibriumWelfare(const SingleMindedInstance& instance,
                                                         int k, int d, int64_t trials,
                                                         uint64_t seed) {
  if (trials <= 0) Fail(ErrorKind::kUsage, "trials must be positive");
  instance.Validate(k, d);
  constexpr int64_t kChunk = 1 << 16;
  const SingleMindedSymmetric sm(k, d, instance.value);
  const int n = instance.n();
  std::vector<SampledStrategy> strategies;
  for (int i = 0; i < n; ++i) strategies.push_back(sm.Strategy(instance, i));
  const PriorityRule rule = PriorityRule::ByIndex(n, instance.m);
  RunningStat welfare, satisfied;
  BidProfile bids(n, instance.m);
  for (int64_t chunk = 0; chunk * kChunk < trials; ++chunk) {
    Rng rng(seed, static_cast<uint64_t>(chunk));
    const int64_t count = std::min(kChunk, trials - chunk * kChunk);
    RunningStat cw, cs;
    for (int64_t t = 0; t < count; ++t) {
      for (int i = 0; i < n; ++i) strategies[i].sample(rng, bids.row(i));
      const Allocation a = Allocate(bids, rule);
      int happy = 0;
      for (int i = 0; i < n; ++i) happy += instance.bundles[i].IsSubsetOf(a.BundleOf(i));
      cs.Add(happy);
      cw.Add(happy * instance.value);
    }
    welfare.Merge(cw);
    satisfied.Merge(cs);
  }
  return {welfare.ToEstimate(), satisfied.ToEstimate(), seed};
}

Money SingleMindedDeviationUtility(const SingleMindedInstance& instance, int player,
                                   std::span<const Money> bundle_bids,
                                   const AtomicCdf& cdf) {
  const std::vector<int> items = instance.bundles.at(player).Indices();
  if (bundle_bids.size() != items.size()) {
    Fail(ErrorKind::kUsage, "deviation needs one bid per bundle item");
  }
  double all = 1.0;
  double paid = 0.0;
  for (size_t q = 0; q < items.size(); ++q) {
    double win = 1.0;
    for (size_t c = 0; c < instance.Competitors(player, items[q]).size(); ++c) {
      win *= cdf.CdfBelow(bundle_bids[q]);
    }
    all *= win;
    paid += bundle_bids[q] * win;
  }
  return instance.value * all - paid;
}

std::optional<SupportWitness> AndSupportSumCheck(const FiniteStrategy& strategy,
                                                 Money and_value) {
  for (size_t k = 0; k < strategy.bids.size(); ++k) {
    if (strategy.probs[k] <= 0) continue;
    const Money total =
        std::accumulate(strategy.bids[k].begin(), strategy.bids[k].end(), 0.0);
    if (total > and_value + kMoneyTolerance) {
      return SupportWitness{strategy.bids[k], total, and_value};
    }
  }
  return std::nullopt;
}

std::optional<SupportWitness> AndSupportSumCheck(const SampledStrategy& strategy,
                                                 Money and_value) {
  if (strategy.support_max_sum > and_value + kMoneyTolerance) {
    return SupportWitness{{}, strategy.support_max_sum, and_value};
  }
  return std::nullopt;
}

}  // namespace sfpa
