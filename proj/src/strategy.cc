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

#include "sfpa/strategy.h"

#include <algorithm>
#include <cmath>

namespace sfpa {

std::string FamilyName(GridFamily family) {
  switch (family) {
    case GridFamily::kFull: return "full";
    case GridFamily::kBundleUniform: return "bundle";
    case GridFamily::kSingleItem: return "single";
  }
  return "full";
}

GridFamily ParseFamily(const std::string& name) {
  if (name == "full") return GridFamily::kFull;
  if (name == "bundle") return GridFamily::kBundleUniform;
  if (name == "single") return GridFamily::kSingleItem;
  Fail(ErrorKind::kUsage, "unknown grid family: " + name);
}

void BidGrid::Validate() const {
  if (!(step > 0) || !std::isfinite(step)) Fail(ErrorKind::kUsage, "grid step must be positive");
  if (!(max >= 0) || !std::isfinite(max)) Fail(ErrorKind::kUsage, "grid max must be nonnegative");
}

std::vector<Money> BidGrid::Levels() const {
  Validate();
  // Tolerate max being a multiple of step up to round-off.
  const auto count = static_cast<int64_t>(std::floor(max / step + 1e-9)) + 1;
  if (count > 100000000) Fail(ErrorKind::kPrecondition, "grid has too many levels");
  std::vector<Money> out(count);
  for (int64_t k = 0; k < count; ++k) out[k] = static_cast<double>(k) * step;
  return out;
}

std::optional<Money> BidGrid::LevelAbove(Money x) const {
  const double k = std::floor((x + kTieTolerance) / step + 1e-9) + 1;
  const Money level = k * step;
  if (level > max + 1e-9 * step) return std::nullopt;
  return level;
}

ItemSet DesiredSet(const Valuation& v) {
  switch (v.kind()) {
    case ValuationKind::kSingleMinded:
    case ValuationKind::kAnd:
    case ValuationKind::kOr:
      return v.bundle();
    default:
      return v.universe();
  }
}

double BidGrid::ActionCount(const Valuation& v) const {
  const double levels = std::floor(max / step + 1e-9) + 1;
  const int m = v.m();
  switch (family) {
    case GridFamily::kFull:
      return std::pow(levels, m);
    case GridFamily::kBundleUniform:
      return levels;
    case GridFamily::kSingleItem: {
      const ItemSet items = bundle.value_or(DesiredSet(v));
      return 1 + (levels - 1) * items.size();
    }
  }
  return 0;
}

std::vector<BidVector> BidGrid::Actions(const Valuation& v) const {
  const std::vector<Money> levels = Levels();
  const int m = v.m();
  std::vector<BidVector> out;
  switch (family) {
    case GridFamily::kFull: {
      if (ActionCount(v) > 5e6) {
        Fail(ErrorKind::kPrecondition, "full product grid exceeds 5e6 actions");
      }
      std::vector<size_t> idx(m, 0);
      while (true) {
        BidVector b(m);
        for (int j = 0; j < m; ++j) b[j] = levels[idx[j]];
        out.push_back(std::move(b));
        int j = m - 1;
        while (j >= 0 && ++idx[j] == levels.size()) idx[j--] = 0;
        if (j < 0) break;
      }
      break;
    }
    case GridFamily::kBundleUniform: {
      const ItemSet items = bundle.value_or(DesiredSet(v));
      for (Money level : levels) {
        BidVector b(m, 0.0);
        for (int j : items.Indices()) b[j] = level;
        out.push_back(std::move(b));
      }
      break;
    }
    case GridFamily::kSingleItem: {
      const ItemSet items = bundle.value_or(DesiredSet(v));
      out.emplace_back(m, 0.0);
      for (int j : items.Indices()) {
        for (size_t k = 1; k < levels.size(); ++k) {
          BidVector b(m, 0.0);
          b[j] = levels[k];
          out.push_back(std::move(b));
        }
      }
      break;
    }
  }
  return out;
}

void FiniteStrategy::Validate(int m) const {
  if (bids.empty() || bids.size() != probs.size()) {
    Fail(ErrorKind::kUsage, "finite strategy needs matching bids and probabilities");
  }
  double total = 0.0;
  for (size_t k = 0; k < bids.size(); ++k) {
    if (static_cast<int>(bids[k].size()) != m) {
      Fail(ErrorKind::kUsage, "strategy bid vector has wrong width");
    }
    for (Money b : bids[k]) {
      if (!std::isfinite(b) || b < 0) Fail(ErrorKind::kUsage, "strategy bids must be nonnegative");
    }
    if (probs[k] < 0) Fail(ErrorKind::kUsage, "negative strategy probability");
    total += probs[k];
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    Fail(ErrorKind::kUsage, "strategy probabilities must sum to 1");
  }
}

void FiniteStrategy::Sample(Rng& rng, std::span<Money> out) const {
  double u = rng.Uniform();
  size_t k = 0;
  for (; k + 1 < probs.size(); ++k) {
    if (u < probs[k]) break;
    u -= probs[k];
  }
  std::copy(bids[k].begin(), bids[k].end(), out.begin());
}

void SampleStrategy(const MixedStrategy& s, Rng& rng, std::span<Money> out) {
  if (const auto* f = std::get_if<FiniteStrategy>(&s)) {
    f->Sample(rng, out);
  } else {
    std::get<SampledStrategy>(s).sample(rng, out);
  }
}

}  // namespace sfpa
