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

#ifndef SFPA_SIMPLEX_H_
#define SFPA_SIMPLEX_H_

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sfpa {

// maximize  objective . x
// s.t.      rows[k] . x <= rhs[k]   for every k
//           x >= 0
// rhs may have any sign (two-phase method).
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;

  void AddRow(std::vector<double> row, double bound) {
    rows.push_back(std::move(row));
    rhs.push_back(bound);
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  double value = 0.0;
  std::vector<double> x;
  int pivots = 0;
};

// Dense two-phase tableau simplex with Bland's rule.
LpResult SolveLp(const LinearProgram& lp);

struct Cut {
  std::vector<double> row;
  double bound = 0.0;
};

// Returns the most violated constraint of the full system at x, or nothing
// when x satisfies every constraint within tolerance.
using Separator = std::function<std::optional<Cut>(std::span<const double> x)>;

// Cutting-plane loop for LPs with few variables and exponentially many
// rows: solves over `lp`'s rows, asks `separator` for a violated row, adds
// it, and repeats. `lp` must already be bounded.
LpResult SolveLpLazy(LinearProgram lp, const Separator& separator,
                     int max_rounds = 10000);

}  // namespace sfpa

#endif  // SFPA_SIMPLEX_H_
