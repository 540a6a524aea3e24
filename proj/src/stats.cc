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

#include "sfpa/stats.h"

#include <algorithm>

namespace sfpa {

double KolmogorovSmirnov(std::vector<std::pair<double, double>> points,
                         const std::function<double(double)>& cdf,
                         const std::function<double(double)>& cdf_below) {
  std::sort(points.begin(), points.end());
  double empirical = 0.0;
  double worst = 0.0;
  size_t k = 0;
  while (k < points.size()) {
    const double x = points[k].first;
    double mass = 0.0;
    while (k < points.size() && points[k].first == x) mass += points[k++].second;
    worst = std::max(worst, std::abs(empirical - cdf_below(x)));
    empirical += mass;
    worst = std::max(worst, std::abs(empirical - cdf(x)));
  }
  return worst;
}

}  // namespace sfpa
