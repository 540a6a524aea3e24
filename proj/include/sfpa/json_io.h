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

#ifndef SFPA_JSON_IO_H_
#define SFPA_JSON_IO_H_

#include <string>
#include <vector>

#include <json.hpp>

#include "sfpa/auction.h"
#include "sfpa/bayes.h"
#include "sfpa/closed_form.h"
#include "sfpa/stats.h"
#include "sfpa/strategy.h"

namespace sfpa {

using Json = nlohmann::json;

// Finite numbers as JSON numbers; infinities and NaN as strings.
Json Number(double x);
Json ItemsJson(ItemSet s);
ItemSet ItemsFromJson(const Json& j, int m);

// {"kind": "table", "values": [...]} | {"kind": "additive", "weights": [...]}
// | {"kind": "single_minded", "bundle": [...], "value": x}
// | {"kind": "and", "value": x} | {"kind": "or", "value": x, "items": [...]}
// | {"kind": "xos", "clauses": [[...], ...]}
// Subsets are sorted arrays of item indices; "items" defaults to all items.
Json ToJson(const Valuation& v);
Valuation ValuationFromJson(const Json& j, int m);

// {"orders": [[...], ...]} or {"mixture": [{"probability": p, "orders": ...}]}
Json ToJson(const TieBreakingRule& rule);
TieBreakingRule TieRuleFromJson(const Json& j, int n, int m);

// {"m": m, "valuations": [...], "tie_rule": {...}}; tie_rule defaults to
// lower index first.
Json ToJson(const Game& game);
Game GameFromJson(const Json& j);

Json ToJson(const Allocation& a);
Json ToJson(const BidProfile& b);
Json ToJson(const Outcome& o);
Json ToJson(const Estimate& e);

// {"bids": [[...], ...], "probs": [...]}; a bare bid vector is a pure strategy.
Json ToJson(const FiniteStrategy& s);
FiniteStrategy FiniteStrategyFromJson(const Json& j, int m);

// {"m": m, "types": [[valuation, ...], ...], "prior": [{"types": [...],
// "probability": p}, ...], "product": bool, "tie_rule": {...},
// "strategies": [[strategy per type], ...]}. Strategies are optional.
FiniteBayesianGame BayesGameFromJson(const Json& j);
BayesProfile BayesProfileFromJson(const Json& j, const FiniteBayesianGame& bg);
Json ToJson(const FiniteBayesianGame& bg);

// {"m": m, "value": x, "bundles": [[...], ...]}
SingleMindedInstance InstanceFromJson(const Json& j);

// Reads and parses a JSON file; throws kUsage on I/O or syntax errors.
Json ReadJsonFile(const std::string& path);

}  // namespace sfpa

#endif  // SFPA_JSON_IO_H_
