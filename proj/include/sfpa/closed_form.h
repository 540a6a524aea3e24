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

#ifndef SFPA_CLOSED_FORM_H_
#define SFPA_CLOSED_FORM_H_

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sfpa/auction.h"
#include "sfpa/common.h"
#include "sfpa/rng.h"
#include "sfpa/stats.h"
#include "sfpa/strategy.h"

namespace sfpa {

struct Atom {
  double point = 0.0;
  double mass = 0.0;
};

// Distribution on [lo, hi] given by a right-continuous CDF that may jump at
// listed atoms. Outside the domain the CDF is clamped to 0 / 1.
class AtomicCdf {
 public:
  // `cdf` is Pr[X <= x] on [lo, hi], including atom mass. `quantile`, when
  // given, must be the generalized inverse inf{x : cdf(x) >= u}; otherwise
  // bisection is used. Throws kUsage when the construction is not a CDF.
  static AtomicCdf Create(double lo, double hi, std::function<double(double)> cdf,
                          std::vector<Atom> atoms,
                          std::function<double(double)> quantile = nullptr);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  // Pr[X <= x].
  double Cdf(double x) const;
  // Pr[X < x].
  double CdfBelow(double x) const;
  double AtomMass(double x) const;
  double Quantile(double u) const;
  double Sample(Rng& rng) const { return Quantile(rng.Uniform()); }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::function<double(double)> cdf_;
  std::function<double(double)> quantile_;
  std::vector<Atom> atoms_;
};

// Result of a closed-form utility evaluation. Bids outside the equilibrium
// support cube are evaluated literally and flagged.
struct Evaluated {
  Money value = 0.0;
  bool out_of_domain = false;
};

// The AND-OR game: an AND bidder values all m items at 1, an OR bidder
// values any nonempty set at v >= 1/m. Ties go to the AND bidder.
class AndOrEquilibrium {
 public:
  static constexpr int kAndPlayer = 0;
  static constexpr int kOrPlayer = 1;

  AndOrEquilibrium(int m, double v);

  int m() const { return m_; }
  double v() const { return v_; }
  // AND bidder's common bid y ~ F(y) = (v - 1/m) / (v - y) on [0, 1/m].
  const AtomicCdf& and_cdf() const { return and_cdf_; }
  // OR bidder's bid x ~ G(x) = (m-1) x / (1 - x) on [0, 1/m].
  const AtomicCdf& or_cdf() const { return or_cdf_; }

  // Valuations (AND, OR) and the AND-first tie rule.
  Game MakeGame() const;

  // Expected utility of the AND bidder bidding x against the OR strategy.
  Evaluated AndUtility(std::span<const Money> x) const;
  // Expected utility of the OR bidder bidding x against the AND strategy.
  Evaluated OrUtility(std::span<const Money> x) const;

  Money AndEquilibriumUtility() const { return 0.0; }
  Money OrEquilibriumUtility() const { return v_ - 1.0 / m_; }

  // Largest deviation gain over the full product grid {0, step, ..., max}^m.
  // Both are exact: the AND utility is separable across items and the OR
  // utility of any vector is at most that of its maximal entry alone.
  struct GridGap {
    Money gap = 0.0;
    BidVector best_deviation;
    Money best_utility = 0.0;
  };
  GridGap AndGridGap(const BidGrid& grid) const;
  GridGap OrGridGap(const BidGrid& grid) const;

  void SampleAndBid(Rng& rng, std::span<Money> out) const;
  void SampleOrBid(Rng& rng, std::span<Money> out) const;
  SampledStrategy AndStrategy() const;
  SampledStrategy OrStrategy() const;

  // Probability that the AND bidder bids 0: 1 - 1/(m v).
  double AndAtomMass() const { return and_cdf_.AtomMass(0.0); }

 private:
  int m_;
  double v_;
  AtomicCdf and_cdf_;
  AtomicCdf or_cdf_;
};

struct AndOrWelfareReport {
  Estimate welfare;
  Estimate and_atom_frequency;  // empirical Pr[AND bids 0]
  Estimate and_win_frequency;
  Estimate revenue;
  double analytic_atom_mass = 0.0;
  uint64_t seed = 0;
};

// Monte Carlo welfare of the AND-OR equilibrium, simulated through the
// auction. Trials are split into fixed-size chunks with per-chunk streams.
AndOrWelfareReport AndOrEquilibriumWelfare(const AndOrEquilibrium& eq,
                                           int64_t trials, uint64_t seed);

// Triangle game deviation utility against two opponents drawing F(x) = 2x:
// -2 (y - z)^2 on [0, 1/2]^2.
Evaluated TriangleUtility(Money y, Money z);
AtomicCdf TriangleCdf();

// Single-minded bidders: each wants k items at value `value`, every item is
// wanted by exactly d bidders, bundles pairwise share at most one item.
struct SingleMindedInstance {
  int m = 0;
  std::vector<ItemSet> bundles;
  Money value = 1.0;

  int n() const { return static_cast<int>(bundles.size()); }
  std::vector<Valuation> Valuations() const;
  // Throws kUsage unless the structure holds for (k, d).
  void Validate(int k, int d) const;
  // Players other than `player` that want `item`.
  std::vector<int> Competitors(int player, int item) const;
};

SingleMindedInstance TriangleInstance();
// l x l items; l row bidders and l column bidders, each valuing its line at l.
SingleMindedInstance GridInstance(int l);

class SingleMindedSymmetric {
 public:
  // Throws kUsage for k < 2 or d < 2.
  SingleMindedSymmetric(int k, int d, Money value = 1.0);

  int k() const { return k_; }
  int d() const { return d_; }
  Money value() const { return value_; }
  // G(x) = (k x / value)^{1/((d-1)(k-1))} on [0, value / k].
  const AtomicCdf& cdf() const { return cdf_; }

  // Deviation utility of one bidder bidding x_1..x_k on its bundle.
  Evaluated Utility(std::span<const Money> x) const;
  SampledStrategy Strategy(const SingleMindedInstance& instance, int player) const;

 private:
  int k_;
  int d_;
  Money value_;
  AtomicCdf cdf_;
};

// Deviation utility of `player` bidding bundle_bids (one entry per item of
// its bundle, increasing item order) when every competitor independently
// draws one bid from `cdf` for all its items. Requires the instance
// structure so competitors' draws on different items are independent.
Money SingleMindedDeviationUtility(const SingleMindedInstance& instance, int player,
                                   std::span<const Money> bundle_bids,
                                   const AtomicCdf& cdf);

struct SingleMindedWelfareReport {
  Estimate welfare;
  Estimate satisfied;  // players winning their whole bundle
  uint64_t seed = 0;
};

// Monte Carlo welfare of the symmetric single-minded equilibrium on an
// instance with the (k, d) structure, simulated through the auction.
SingleMindedWelfareReport SingleMindedEquilibriumWelfare(const SingleMindedInstance& instance,
                                                         int k, int d, int64_t trials,
                                                         uint64_t seed);

// Witness of a support bid vector whose total exceeds the AND value.
struct SupportWitness {
  BidVector bid;
  Money total = 0.0;
  Money limit = 0.0;
};

std::optional<SupportWitness> AndSupportSumCheck(const FiniteStrategy& strategy,
                                                 Money and_value);
std::optional<SupportWitness> AndSupportSumCheck(const SampledStrategy& strategy,
                                                 Money and_value);

}  // namespace sfpa

#endif  // SFPA_CLOSED_FORM_H_
