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

#include "sfpa/valuation.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfpa/simplex.h"

namespace sfpa {
namespace {

void CheckItemCount(int m, int limit = kMaxItems) {
  if (m < 0 || m > limit) {
    Fail(ErrorKind::kPrecondition,
         "item count " + std::to_string(m) + " outside [0, " + std::to_string(limit) + "]");
  }
}

void CheckFinite(Money x, const char* what) {
  if (!std::isfinite(x)) Fail(ErrorKind::kUsage, std::string(what) + " is not finite");
}

}  // namespace

std::string KindName(ValuationKind kind) {
  switch (kind) {
    case ValuationKind::kTable: return "table";
    case ValuationKind::kAdditive: return "additive";
    case ValuationKind::kSingleMinded: return "single_minded";
    case ValuationKind::kAnd: return "and";
    case ValuationKind::kOr: return "or";
    case ValuationKind::kXos: return "xos";
  }
  return "unknown";
}

Valuation Valuation::Table(int m, std::vector<Money> values) {
  CheckItemCount(m);
  if (values.size() != (size_t{1} << m)) {
    Fail(ErrorKind::kUsage, "table valuation needs 2^m entries");
  }
  for (Money x : values) CheckFinite(x, "table entry");
  Valuation v(ValuationKind::kTable, m);
  v.table_ = std::move(values);
  return v;
}

Valuation Valuation::Additive(std::vector<Money> weights) {
  const int m = static_cast<int>(weights.size());
  CheckItemCount(m, kMaxStructuredItems);
  for (Money x : weights) CheckFinite(x, "additive weight");
  Valuation v(ValuationKind::kAdditive, m);
  v.weights_ = std::move(weights);
  return v;
}

Valuation Valuation::SingleMinded(int m, ItemSet bundle, Money value) {
  CheckItemCount(m, kMaxStructuredItems);
  CheckFinite(value, "single-minded value");
  if (!bundle.IsSubsetOf(ItemSet::Full(m))) {
    Fail(ErrorKind::kUsage, "single-minded bundle outside item universe");
  }
  Valuation v(ValuationKind::kSingleMinded, m);
  v.bundle_ = bundle;
  v.scalar_ = value;
  return v;
}

Valuation Valuation::And(int m, Money value) {
  CheckItemCount(m, kMaxStructuredItems);
  CheckFinite(value, "AND value");
  Valuation v(ValuationKind::kAnd, m);
  v.bundle_ = ItemSet::Full(m);
  v.scalar_ = value;
  return v;
}

Valuation Valuation::Or(int m, Money value, ItemSet items) {
  CheckItemCount(m, kMaxStructuredItems);
  CheckFinite(value, "OR value");
  if (!items.IsSubsetOf(ItemSet::Full(m))) {
    Fail(ErrorKind::kUsage, "OR item set outside item universe");
  }
  Valuation v(ValuationKind::kOr, m);
  v.bundle_ = items;
  v.scalar_ = value;
  return v;
}

Valuation Valuation::Xos(int m, std::vector<std::vector<Money>> clauses) {
  CheckItemCount(m);
  for (const auto& c : clauses) {
    if (static_cast<int>(c.size()) != m) {
      Fail(ErrorKind::kUsage, "XOS clause width differs from item count");
    }
    for (Money x : c) {
      CheckFinite(x, "XOS clause entry");
      if (x < 0) Fail(ErrorKind::kUsage, "XOS clause entries must be nonnegative");
    }
  }
  Valuation v(ValuationKind::kXos, m);
  v.clauses_ = std::move(clauses);
  return v;
}

Money ClauseValue(const std::vector<Money>& a, ItemSet s) {
  Money total = 0.0;
  for (uint32_t b = s.bits(); b != 0; b &= b - 1) total += a[std::countr_zero(b)];
  return total;
}

Money Valuation::Value(ItemSet s) const {
  switch (kind_) {
    case ValuationKind::kTable:
      return table_[s.bits()];
    case ValuationKind::kAdditive:
      return ClauseValue(weights_, s);
    case ValuationKind::kSingleMinded:
    case ValuationKind::kAnd:
      return bundle_.IsSubsetOf(s) ? scalar_ : 0.0;
    case ValuationKind::kOr:
      return (s & bundle_).empty() ? 0.0 : scalar_;
    case ValuationKind::kXos: {
      Money best = 0.0;
      for (const auto& c : clauses_) best = std::max(best, ClauseValue(c, s));
      return best;
    }
  }
  return 0.0;
}

std::vector<Money> Valuation::ToTable() const {
  if (kind_ == ValuationKind::kTable) return table_;
  CheckItemCount(m_);
  std::vector<Money> out(size_t{1} << m_);
  for (uint32_t s = 0; s < out.size(); ++s) out[s] = Value(ItemSet(s));
  return out;
}

std::optional<MonotonicityViolation> CheckValid(const Valuation& v) {
  const std::vector<Money> t = v.ToTable();
  if (std::abs(t[0]) > 0.0) {
    return MonotonicityViolation{ItemSet(), ItemSet(), t[0], t[0]};
  }
  for (uint32_t s = 0; s < t.size(); ++s) {
    if (t[s] < 0) {
      return MonotonicityViolation{ItemSet(s), ItemSet(s), t[s], t[s]};
    }
    for (int j = 0; j < v.m(); ++j) {
      if ((s >> j) & 1u) continue;
      const uint32_t bigger = s | (1u << j);
      if (t[bigger] < t[s] - kMoneyTolerance) {
        return MonotonicityViolation{ItemSet(s), ItemSet(bigger), t[s], t[bigger]};
      }
    }
  }
  return std::nullopt;
}

std::vector<Money> XosSupportingClause(const Valuation& v, ItemSet target) {
  const int m = v.m();
  if (!target.IsSubsetOf(v.universe())) {
    Fail(ErrorKind::kUsage, "target set outside item universe");
  }
  std::vector<Money> a(m, 0.0);
  if (target.empty()) return a;

  if (v.kind() == ValuationKind::kXos) {
    const std::vector<Money>* best = nullptr;
    Money best_value = -1.0;
    for (const auto& c : v.clauses()) {
      const Money value = ClauseValue(c, target);
      if (value > best_value) {
        best_value = value;
        best = &c;
      }
    }
    if (best != nullptr) {
      for (int j : target.Indices()) a[j] = (*best)[j];
    }
    return a;
  }
  if (v.kind() == ValuationKind::kAdditive) {
    for (int j : target.Indices()) a[j] = std::max(0.0, v.weights()[j]);
    return a;
  }

  // Variables are the items of `target`, in increasing order. For valid
  // (monotone) v only constraints S subset of target can bind.
  const std::vector<int> items = target.Indices();
  const int k = static_cast<int>(items.size());
  LinearProgram lp;
  lp.num_vars = k;
  lp.objective.assign(k, 1.0);
  for (int q = 0; q < k; ++q) {
    std::vector<double> row(k, 0.0);
    row[q] = 1.0;
    lp.AddRow(std::move(row), v.Value(ItemSet::Single(items[q])));
  }
  auto separator = [&](std::span<const double> x) -> std::optional<Cut> {
    double worst = 1e-11;
    uint32_t worst_local = 0;
    const uint32_t full_local = (1u << k) - 1u;
    for (uint32_t local = 1; local <= full_local; ++local) {
      double lhs = 0.0;
      uint32_t global = 0;
      for (int q = 0; q < k; ++q) {
        if ((local >> q) & 1u) {
          lhs += x[q];
          global |= 1u << items[q];
        }
      }
      const double violation = lhs - v.Value(ItemSet(global));
      if (violation > worst) {
        worst = violation;
        worst_local = local;
      }
    }
    if (worst_local == 0) return std::nullopt;
    Cut cut;
    cut.row.assign(k, 0.0);
    uint32_t global = 0;
    for (int q = 0; q < k; ++q) {
      if ((worst_local >> q) & 1u) {
        cut.row[q] = 1.0;
        global |= 1u << items[q];
      }
    }
    cut.bound = v.Value(ItemSet(global));
    return cut;
  };
  const LpResult result = SolveLpLazy(std::move(lp), separator);
  if (result.status != LpStatus::kOptimal) {
    Fail(ErrorKind::kInternal, "supporting-clause LP did not converge");
  }
  for (int q = 0; q < k; ++q) a[items[q]] = std::max(0.0, result.x[q]);

  // Pull back any round-off excess so the clause never exceeds v.
  double scale = 1.0;
  ForEachSubset(target, [&](ItemSet s) {
    const Money lhs = ClauseValue(a, s);
    const Money rhs = v.Value(s);
    if (lhs > rhs && lhs > 0) scale = std::min(scale, rhs / lhs);
  });
  if (scale < 1.0) {
    for (Money& x : a) x *= scale;
  }
  return a;
}

BetaCertificate BetaOf(const Valuation& v) {
  if (v.m() > 12) {
    Fail(ErrorKind::kPrecondition, "beta computation limited to m <= 12");
  }
  BetaCertificate cert;
  cert.clauses.assign(size_t{1} << v.m(), std::vector<Money>(v.m(), 0.0));
  cert.beta = 1.0;
  for (uint32_t t = 1; t < cert.clauses.size(); ++t) {
    const ItemSet target(t);
    cert.clauses[t] = XosSupportingClause(v, target);
    const Money value = v.Value(target);
    if (value <= kMoneyTolerance) continue;
    const Money support = ClauseValue(cert.clauses[t], target);
    const double ratio = support > kMoneyTolerance
                             ? value / support
                             : std::numeric_limits<double>::infinity();
    if (ratio > cert.beta) {
      cert.beta = ratio;
      cert.worst_set = target;
    }
  }
  // Exact XOS / fractionally subadditive inputs land on 1 up to LP round-off.
  if (cert.beta < 1.0 + 1e-9) cert.beta = 1.0;
  return cert;
}

}  // namespace sfpa
