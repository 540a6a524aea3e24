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

#ifndef SFPA_STRATEGY_H_
#define SFPA_STRATEGY_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sfpa/common.h"
#include "sfpa/rng.h"
#include "sfpa/valuation.h"

namespace sfpa {

using BidVector = std::vector<Money>;

enum class GridFamily {
  kFull,           // every vector in {0, step, ..., max}^m
  kBundleUniform,  // one level on every item of a bundle, zero elsewhere
  kSingleItem,     // one level on a single item, zero elsewhere
};

std::string FamilyName(GridFamily family);
GridFamily ParseFamily(const std::string& name);

// Discretized bid space. Levels are the multiples of `step` in [0, max].
struct BidGrid {
  double step = 0.05;
  double max = 1.0;
  GridFamily family = GridFamily::kFull;
  // Bundle for kBundleUniform; when empty the player's desired set is used
  // (single-minded/AND bundle, OR item set), falling back to all items.
  std::optional<ItemSet> bundle;

  std::vector<Money> Levels() const;
  // Smallest level strictly greater than x + tolerance, if any.
  std::optional<Money> LevelAbove(Money x) const;
  // All action vectors for a player with valuation v.
  std::vector<BidVector> Actions(const Valuation& v) const;
  // Number of actions without materializing them.
  double ActionCount(const Valuation& v) const;
  void Validate() const;
};

// Bundle a structured family bids on for this valuation.
ItemSet DesiredSet(const Valuation& v);

// Finite-support mixed strategy over bid vectors.
struct FiniteStrategy {
  std::vector<BidVector> bids;
  std::vector<double> probs;

  static FiniteStrategy Pure(BidVector bid) { return {{std::move(bid)}, {1.0}}; }
  // Throws kUsage unless probs are a distribution and widths agree.
  void Validate(int m) const;
  void Sample(Rng& rng, std::span<Money> out) const;
};

// Strategy known only through a sampler (closed forms).
struct SampledStrategy {
  std::string name;
  std::function<void(Rng&, std::span<Money>)> sample;
  // Largest value of sum_j b_j over the support.
  Money support_max_sum = 0.0;
};

using MixedStrategy = std::variant<FiniteStrategy, SampledStrategy>;

void SampleStrategy(const MixedStrategy& s, Rng& rng, std::span<Money> out);

}  // namespace sfpa

#endif  // SFPA_STRATEGY_H_
