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

#include "sfpa/simplex.h"

#include <cmath>
#include <limits>

#include "sfpa/common.h"

namespace sfpa {
namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kFeasEps = 1e-9;
constexpr int kMaxPivots = 200000;

class Tableau {
 public:
  Tableau(const LinearProgram& lp)
      : num_rows_(static_cast<int>(lp.rows.size())),
        num_vars_(lp.num_vars) {
    int artificials = 0;
    for (double b : lp.rhs) artificials += b < 0 ? 1 : 0;
    num_cols_ = num_vars_ + num_rows_ + artificials;
    first_artificial_ = num_vars_ + num_rows_;
    cells_.assign(static_cast<size_t>(num_rows_ + 1) * (num_cols_ + 1), 0.0);
    basis_.assign(num_rows_, -1);

    int next_artificial = first_artificial_;
    for (int r = 0; r < num_rows_; ++r) {
      const double sign = lp.rhs[r] < 0 ? -1.0 : 1.0;
      for (int j = 0; j < num_vars_; ++j) At(r, j) = sign * lp.rows[r][j];
      At(r, num_vars_ + r) = sign;
      Rhs(r) = sign * lp.rhs[r];
      if (sign < 0) {
        At(r, next_artificial) = 1.0;
        basis_[r] = next_artificial++;
      } else {
        basis_[r] = num_vars_ + r;
      }
    }
  }

  // Phase one. Returns false when the system is infeasible.
  bool FindFeasibleBasis(int* pivots) {
    if (first_artificial_ == num_cols_) return true;
    ClearObjective();
    for (int j = first_artificial_; j < num_cols_; ++j) Obj(j) = 1.0;
    Canonicalize();
    if (!Optimize(num_cols_, pivots)) return false;
    if (ObjRhs() < -kFeasEps) return false;
    // Drive zero-level artificials out of the basis.
    for (int r = 0; r < num_rows_; ++r) {
      if (basis_[r] < first_artificial_) continue;
      for (int j = 0; j < first_artificial_; ++j) {
        if (std::abs(At(r, j)) > kPivotEps) {
          Pivot(r, j);
          ++*pivots;
          break;
        }
      }
    }
    return true;
  }

  LpStatus Maximize(const std::vector<double>& objective, int* pivots) {
    ClearObjective();
    for (int j = 0; j < num_vars_; ++j) Obj(j) = -objective[j];
    Canonicalize();
    // Artificials never re-enter.
    if (!Optimize(first_artificial_, pivots)) {
      return *pivots >= kMaxPivots ? LpStatus::kIterationLimit
                                   : LpStatus::kUnbounded;
    }
    return LpStatus::kOptimal;
  }

  double ObjRhs() const { return cells_[Index(num_rows_, num_cols_)]; }

  std::vector<double> Solution() const {
    std::vector<double> x(num_vars_, 0.0);
    for (int r = 0; r < num_rows_; ++r) {
      if (basis_[r] < num_vars_) x[basis_[r]] = Rhs(r);
    }
    return x;
  }

 private:
  size_t Index(int r, int c) const {
    return static_cast<size_t>(r) * (num_cols_ + 1) + c;
  }
  double& At(int r, int c) { return cells_[Index(r, c)]; }
  double At(int r, int c) const { return cells_[Index(r, c)]; }
  double& Rhs(int r) { return cells_[Index(r, num_cols_)]; }
  double Rhs(int r) const { return cells_[Index(r, num_cols_)]; }
  double& Obj(int c) { return cells_[Index(num_rows_, c)]; }

  void ClearObjective() {
    for (int j = 0; j <= num_cols_; ++j) Obj(j) = 0.0;
  }

  // Zero out objective entries of basic columns.
  void Canonicalize() {
    for (int r = 0; r < num_rows_; ++r) {
      const double d = Obj(basis_[r]);
      if (d == 0.0) continue;
      for (int j = 0; j <= num_cols_; ++j) Obj(j) -= d * At(r, j);
    }
  }

  // Returns false on unboundedness or pivot limit.
  bool Optimize(int allowed_cols, int* pivots) {
    while (true) {
      int entering = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (Obj(j) < -kPivotEps) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;
      int leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < num_rows_; ++r) {
        const double a = At(r, entering);
        if (a <= kPivotEps) continue;
        const double ratio = Rhs(r) / a;
        if (ratio < best_ratio - 1e-13 ||
            (ratio <= best_ratio + 1e-13 && leaving >= 0 &&
             basis_[r] < basis_[leaving])) {
          best_ratio = std::min(best_ratio, ratio);
          leaving = r;
        }
      }
      if (leaving < 0) return false;
      Pivot(leaving, entering);
      if (++*pivots >= kMaxPivots) return false;
    }
  }

  void Pivot(int row, int col) {
    const double inv = 1.0 / At(row, col);
    for (int j = 0; j <= num_cols_; ++j) At(row, j) *= inv;
    At(row, col) = 1.0;
    for (int r = 0; r <= num_rows_; ++r) {
      if (r == row) continue;
      const double f = cells_[Index(r, col)];
      if (f == 0.0) continue;
      for (int j = 0; j <= num_cols_; ++j) {
        cells_[Index(r, j)] -= f * At(row, j);
      }
      cells_[Index(r, col)] = 0.0;
    }
    basis_[row] = col;
  }

  int num_rows_;
  int num_vars_;
  int num_cols_ = 0;
  int first_artificial_ = 0;
  std::vector<double> cells_;
  std::vector<int> basis_;
};

}  // namespace

LpResult SolveLp(const LinearProgram& lp) {
  if (static_cast<int>(lp.objective.size()) != lp.num_vars ||
      lp.rows.size() != lp.rhs.size()) {
    Fail(ErrorKind::kInternal, "malformed linear program");
  }
  for (const auto& row : lp.rows) {
    if (static_cast<int>(row.size()) != lp.num_vars) {
      Fail(ErrorKind::kInternal, "linear program row has wrong width");
    }
  }
  LpResult result;
  Tableau tableau(lp);
  if (!tableau.FindFeasibleBasis(&result.pivots)) {
    result.status = result.pivots >= kMaxPivots ? LpStatus::kIterationLimit
                                                : LpStatus::kInfeasible;
    return result;
  }
  result.status = tableau.Maximize(lp.objective, &result.pivots);
  if (result.status == LpStatus::kOptimal) {
    result.x = tableau.Solution();
    result.value = 0.0;
    for (int j = 0; j < lp.num_vars; ++j) {
      result.value += lp.objective[j] * result.x[j];
    }
  }
  return result;
}

LpResult SolveLpLazy(LinearProgram lp, const Separator& separator,
                     int max_rounds) {
  LpResult result;
  int total_pivots = 0;
  for (int round = 0; round < max_rounds; ++round) {
    result = SolveLp(lp);
    total_pivots += result.pivots;
    result.pivots = total_pivots;
    if (result.status != LpStatus::kOptimal) return result;
    std::optional<Cut> cut = separator(result.x);
    if (!cut) return result;
    lp.AddRow(std::move(cut->row), cut->bound);
  }
  result.status = LpStatus::kIterationLimit;
  return result;
}

}  // namespace sfpa
