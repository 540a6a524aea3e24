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

#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "sfpa/rng.h"

namespace sfpa {
namespace {

TEST(SimplexTest, TextbookMaximum) {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {3, 5};
  lp.AddRow({1, 0}, 4);
  lp.AddRow({0, 2}, 12);
  lp.AddRow({3, 2}, 18);
  const LpResult r = SolveLp(lp);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.value, 36.0, 1e-9);
  EXPECT_NEAR(r.x[0], 2.0, 1e-9);
  EXPECT_NEAR(r.x[1], 6.0, 1e-9);
}

TEST(SimplexTest, NegativeRightHandSideNeedsPhaseOne) {
  // min x + y  s.t. x + y >= 1, x - y <= 0.5.
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {-1, -1};
  lp.AddRow({-1, -1}, -1);
  lp.AddRow({1, -1}, 0.5);
  const LpResult r = SolveLp(lp);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.value, -1.0, 1e-9);
}

TEST(SimplexTest, DetectsInfeasibleAndUnbounded) {
  LinearProgram infeasible;
  infeasible.num_vars = 1;
  infeasible.objective = {1};
  infeasible.AddRow({1}, 1);
  infeasible.AddRow({-1}, -2);
  EXPECT_EQ(SolveLp(infeasible).status, LpStatus::kInfeasible);

  LinearProgram unbounded;
  unbounded.num_vars = 2;
  unbounded.objective = {1, 0};
  unbounded.AddRow({-1, 1}, 1);
  EXPECT_EQ(SolveLp(unbounded).status, LpStatus::kUnbounded);
}

TEST(SimplexTest, DegenerateCyclingExampleTerminates) {
  // Beale's example cycles under the largest-coefficient rule.
  LinearProgram lp;
  lp.num_vars = 4;
  lp.objective = {0.75, -150, 0.02, -6};
  lp.AddRow({0.25, -60, -0.04, 9}, 0);
  lp.AddRow({0.5, -90, -0.02, 3}, 0);
  lp.AddRow({0, 0, 1, 0}, 1);
  const LpResult r = SolveLp(lp);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.value, 0.05, 1e-9);
}

// Oracle: for two variables the optimum sits on a vertex formed by two
// tight constraints (including x >= 0, y >= 0); enumerate them all.
double VertexOracle(const LinearProgram& lp) {
  std::vector<std::vector<double>> rows = lp.rows;
  std::vector<double> rhs = lp.rhs;
  rows.push_back({-1, 0});
  rhs.push_back(0);
  rows.push_back({0, -1});
  rhs.push_back(0);
  double best = -std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < rows.size(); ++a) {
    for (size_t b = a + 1; b < rows.size(); ++b) {
      const double det = rows[a][0] * rows[b][1] - rows[a][1] * rows[b][0];
      if (std::abs(det) < 1e-12) continue;
      const double x = (rhs[a] * rows[b][1] - rows[a][1] * rhs[b]) / det;
      const double y = (rows[a][0] * rhs[b] - rhs[a] * rows[b][0]) / det;
      bool ok = x >= -1e-9 && y >= -1e-9;
      for (size_t k = 0; k < rows.size() && ok; ++k) {
        ok = rows[k][0] * x + rows[k][1] * y <= rhs[k] + 1e-9;
      }
      if (ok) best = std::max(best, lp.objective[0] * x + lp.objective[1] * y);
    }
  }
  return best;
}

TEST(SimplexTest, MatchesVertexEnumerationOnRandomBoundedLps) {
  Rng rng(42);
  for (int rep = 0; rep < 300; ++rep) {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {rng.Uniform() * 2 - 0.5, rng.Uniform() * 2 - 0.5};
    lp.AddRow({1, 1}, 1 + 4 * rng.Uniform());  // keeps it bounded
    for (int k = 0; k < 4; ++k) {
      lp.AddRow({rng.Uniform() * 4 - 2, rng.Uniform() * 4 - 2}, rng.Uniform() * 3 - 1);
    }
    const double oracle = VertexOracle(lp);
    const LpResult r = SolveLp(lp);
    if (std::isinf(oracle)) {
      EXPECT_EQ(r.status, LpStatus::kInfeasible) << rep;
    } else {
      ASSERT_EQ(r.status, LpStatus::kOptimal) << rep;
      EXPECT_NEAR(r.value, oracle, 1e-8) << rep;
    }
  }
}

TEST(SimplexTest, LazyRowsReachFullOptimum) {
  // max x + y over x, y <= 1 plus x + y <= 1.5, supplied lazily.
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {1, 1};
  lp.AddRow({1, 0}, 1);
  lp.AddRow({0, 1}, 1);
  int calls = 0;
  const LpResult r = SolveLpLazy(lp, [&](std::span<const double> x) -> std::optional<Cut> {
    ++calls;
    if (x[0] + x[1] > 1.5 + 1e-10) return Cut{{1, 1}, 1.5};
    return std::nullopt;
  });
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.value, 1.5, 1e-9);
  EXPECT_EQ(calls, 2);
}

}  // namespace
}  // namespace sfpa
