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

#ifndef SFPA_STATS_H_
#define SFPA_STATS_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace sfpa {

// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

struct Estimate {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 99% normal-approximation half width
  int64_t samples = 0;

  double lo() const { return mean - ci_half_width; }
  double hi() const { return mean + ci_half_width; }
  bool Covers(double x, double extra = 0.0) const {
    return std::abs(x - mean) <= ci_half_width + extra;
  }
};

// Welford accumulator; Merge() is order-sensitive only in the last few ulps,
// so callers reduce chunks in a fixed order.
class RunningStat {
 public:
  void Add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void Merge(const RunningStat& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n_ + o.n_);
    const double delta = o.mean_ - mean_;
    mean_ += delta * static_cast<double>(o.n_) / total;
    m2_ += o.m2_ + delta * delta * static_cast<double>(n_) *
                       static_cast<double>(o.n_) / total;
    n_ += o.n_;
  }

  int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }

  Estimate ToEstimate() const {
    Estimate e;
    e.mean = mean_;
    e.samples = n_;
    e.ci_half_width =
        n_ > 1 ? kZ99 * std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    return e;
  }

 private:
  int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Kolmogorov-Smirnov distance between an empirical weighted sample and a
// reference CDF. `points` need not be sorted; weights must sum to one.
double KolmogorovSmirnov(std::vector<std::pair<double, double>> points,
                         const std::function<double(double)>& cdf,
                         const std::function<double(double)>& cdf_below);

}  // namespace sfpa

#endif  // SFPA_STATS_H_
