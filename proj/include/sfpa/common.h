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

#ifndef SFPA_COMMON_H_
#define SFPA_COMMON_H_

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfpa {

using Money = double;

// Comparison tolerance for money values (utilities, prices, LP checks).
inline constexpr double kMoneyTolerance = 1e-9;
// Two bids within this distance of each other are a tie.
inline constexpr double kTieTolerance = 1e-12;
// Probability vectors must sum to one within this.
inline constexpr double kProbTolerance = 1e-12;

inline constexpr int kMaxItems = 20;
// Structured valuations never materialize tables and fit a 32-bit item set.
inline constexpr int kMaxStructuredItems = 31;

enum class ErrorKind {
  kUsage,         // malformed input, bad arguments
  kPrecondition,  // size caps, violated operation preconditions
  kInternal,      // solver failure, broken invariants
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

// A subset of items {0..m-1}, stored as a bitmask.
class ItemSet {
 public:
  constexpr ItemSet() = default;
  constexpr explicit ItemSet(uint32_t bits) : bits_(bits) {}

  static constexpr ItemSet Full(int m) {
    return ItemSet(m >= 32 ? ~0u : ((1u << m) - 1u));
  }
  static constexpr ItemSet Single(int item) { return ItemSet(1u << item); }
  static ItemSet FromIndices(const std::vector<int>& items) {
    uint32_t bits = 0;
    for (int j : items) {
      if (j < 0 || j >= kMaxStructuredItems) {
        Fail(ErrorKind::kUsage, "item index out of range: " + std::to_string(j));
      }
      bits |= 1u << j;
    }
    return ItemSet(bits);
  }

  constexpr uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool Contains(int item) const { return (bits_ >> item) & 1u; }
  constexpr bool IsSubsetOf(ItemSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  int size() const { return std::popcount(bits_); }

  constexpr ItemSet With(int item) const { return ItemSet(bits_ | (1u << item)); }
  constexpr ItemSet Without(int item) const {
    return ItemSet(bits_ & ~(1u << item));
  }
  constexpr ItemSet operator|(ItemSet o) const { return ItemSet(bits_ | o.bits_); }
  constexpr ItemSet operator&(ItemSet o) const { return ItemSet(bits_ & o.bits_); }
  constexpr ItemSet Minus(ItemSet o) const { return ItemSet(bits_ & ~o.bits_); }
  constexpr bool operator==(const ItemSet&) const = default;

  std::vector<int> Indices() const {
    std::vector<int> out;
    for (uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

 private:
  uint32_t bits_ = 0;
};

// Calls fn(ItemSet) for every subset of `universe`, including the empty set.
template <typename Fn>
void ForEachSubset(ItemSet universe, Fn&& fn) {
  const uint32_t u = universe.bits();
  uint32_t s = 0;
  while (true) {
    fn(ItemSet(s));
    if (s == u) break;
    s = (s - u) & u;
  }
}

}  // namespace sfpa

#endif  // SFPA_COMMON_H_
