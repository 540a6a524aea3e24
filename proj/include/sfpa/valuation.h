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

#ifndef SFPA_VALUATION_H_
#define SFPA_VALUATION_H_

#include <optional>
#include <string>
#include <vector>

#include "sfpa/common.h"

namespace sfpa {

enum class ValuationKind { kTable, kAdditive, kSingleMinded, kAnd, kOr, kXos };

std::string KindName(ValuationKind kind);

// A monotone set function over m items. Immutable once built; structured
// kinds answer Value() without materializing the 2^m table.
class Valuation {
 public:
  // Dense table indexed by ItemSet bits; size must be 2^m.
  static Valuation Table(int m, std::vector<Money> values);
  static Valuation Additive(std::vector<Money> weights);
  static Valuation SingleMinded(int m, ItemSet bundle, Money value);
  // Value only for the whole item set.
  static Valuation And(int m, Money value);
  // Value for any nonempty intersection with `items`.
  static Valuation Or(int m, Money value, ItemSet items);
  static Valuation Or(int m, Money value) { return Or(m, value, ItemSet::Full(m)); }
  // Maximum over additive clauses; every clause has m entries.
  static Valuation Xos(int m, std::vector<std::vector<Money>> clauses);

  int m() const { return m_; }
  ValuationKind kind() const { return kind_; }
  ItemSet universe() const { return ItemSet::Full(m_); }

  Money Value(ItemSet s) const;
  Money operator()(ItemSet s) const { return Value(s); }

  // Materialized 2^m table (m <= kMaxItems).
  std::vector<Money> ToTable() const;

  // Kind-specific payload accessors (used by serialization).
  const std::vector<Money>& table() const { return table_; }
  const std::vector<Money>& weights() const { return weights_; }
  const std::vector<std::vector<Money>>& clauses() const { return clauses_; }
  ItemSet bundle() const { return bundle_; }
  Money scalar() const { return scalar_; }

 private:
  Valuation(ValuationKind kind, int m) : kind_(kind), m_(m) {}

  ValuationKind kind_;
  int m_;
  std::vector<Money> table_;
  std::vector<Money> weights_;
  std::vector<std::vector<Money>> clauses_;
  ItemSet bundle_;
  Money scalar_ = 0.0;
};

struct MonotonicityViolation {
  ItemSet smaller;  // smaller == larger means v(empty) != 0 or a negative value
  ItemSet larger;
  Money smaller_value = 0.0;
  Money larger_value = 0.0;
};

// Checks v(empty) = 0, v >= 0, and v(S) <= v(S + j) for all adjacent pairs.
// Returns the first violation in subset order.
std::optional<MonotonicityViolation> CheckValid(const Valuation& v);

// Additive vector a with a_j = 0 off `target` and sum_{j in S} a_j <= v(S)
// for every S, maximizing sum_{j in target} a_j. XOS valuations return their
// best clause for `target` (restricted to target).
std::vector<Money> XosSupportingClause(const Valuation& v, ItemSet target);

struct BetaCertificate {
  double beta = 1.0;  // +infinity when some v(T) > 0 has no positive support
  // clauses[T.bits()] is the certified supporting vector for T.
  std::vector<std::vector<Money>> clauses;
  ItemSet worst_set;  // a set attaining beta
};

// Smallest beta such that v is beta-XOS, with per-set clauses (m <= 12).
BetaCertificate BetaOf(const Valuation& v);

// Sum of a over items in s.
Money ClauseValue(const std::vector<Money>& a, ItemSet s);

}  // namespace sfpa

#endif  // SFPA_VALUATION_H_
