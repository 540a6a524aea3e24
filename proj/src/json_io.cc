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

#include "sfpa/json_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sfpa {
namespace {

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    Fail(ErrorKind::kUsage, std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

// Converts library type errors into usage errors naming the context.
template <typename T>
T As(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kUsage, std::string("bad ") + what + ": " + e.what());
  }
}

std::vector<Money> MoneyVector(const Json& j, const char* what) {
  return As<std::vector<Money>>(j, what);
}

PriorityRule PriorityFromOrders(const Json& orders, int n, int m) {
  auto o = As<std::vector<std::vector<int>>>(orders, "tie rule orders");
  if (o.size() == 1 && m > 1) o.assign(m, o.front());
  if (static_cast<int>(o.size()) != m) Fail(ErrorKind::kUsage, "tie rule needs one order per item");
  return PriorityRule(n, std::move(o));
}

}  // namespace

Json Number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json ItemsJson(ItemSet s) { return s.Indices(); }

ItemSet ItemsFromJson(const Json& j, int m) {
  const ItemSet s = ItemSet::FromIndices(As<std::vector<int>>(j, "item list"));
  if (!s.IsSubsetOf(ItemSet::Full(m))) Fail(ErrorKind::kUsage, "item index exceeds m");
  return s;
}

Json ToJson(const Valuation& v) {
  Json j;
  j["kind"] = KindName(v.kind());
  switch (v.kind()) {
    case ValuationKind::kTable: j["values"] = v.table(); break;
    case ValuationKind::kAdditive: j["weights"] = v.weights(); break;
    case ValuationKind::kSingleMinded:
      j["bundle"] = ItemsJson(v.bundle());
      j["value"] = v.scalar();
      break;
    case ValuationKind::kAnd: j["value"] = v.scalar(); break;
    case ValuationKind::kOr:
      j["value"] = v.scalar();
      j["items"] = ItemsJson(v.bundle());
      break;
    case ValuationKind::kXos: j["clauses"] = v.clauses(); break;
  }
  return j;
}

Valuation ValuationFromJson(const Json& j, int m) {
  const std::string kind = As<std::string>(Field(j, "kind"), "valuation kind");
  Valuation v = [&] {
    if (kind == "table") return Valuation::Table(m, MoneyVector(Field(j, "values"), "table"));
    if (kind == "additive") {
      auto w = MoneyVector(Field(j, "weights"), "weights");
      if (static_cast<int>(w.size()) != m) Fail(ErrorKind::kUsage, "additive weights need m entries");
      return Valuation::Additive(std::move(w));
    }
    if (kind == "single_minded") {
      return Valuation::SingleMinded(m, ItemsFromJson(Field(j, "bundle"), m),
                                     As<Money>(Field(j, "value"), "value"));
    }
    if (kind == "and") return Valuation::And(m, As<Money>(Field(j, "value"), "value"));
    if (kind == "or") {
      const ItemSet items = j.contains("items") ? ItemsFromJson(j.at("items"), m) : ItemSet::Full(m);
      return Valuation::Or(m, As<Money>(Field(j, "value"), "value"), items);
    }
    if (kind == "xos") {
      return Valuation::Xos(
          m, As<std::vector<std::vector<Money>>>(Field(j, "clauses"), "XOS clauses"));
    }
    Fail(ErrorKind::kUsage, "unknown valuation kind \"" + kind + "\"");
  }();
  if (const auto bad = CheckValid(v)) {
    Fail(ErrorKind::kUsage, "valuation is not monotone or v(empty) != 0 at set " +
                                Json(ItemsJson(bad->larger)).dump());
  }
  return v;
}

Json ToJson(const TieBreakingRule& rule) {
  Json j;
  if (rule.deterministic()) {
    j["orders"] = rule.priority().orders();
    return j;
  }
  j["mixture"] = Json::array();
  for (const WeightedRule& w : rule.mixture()) {
    j["mixture"].push_back({{"probability", w.probability}, {"orders", w.rule.orders()}});
  }
  return j;
}

TieBreakingRule TieRuleFromJson(const Json& j, int n, int m) {
  if (j.is_object() && j.contains("mixture")) {
    std::vector<WeightedRule> mixture;
    for (const Json& w : j.at("mixture")) {
      mixture.push_back({As<double>(Field(w, "probability"), "probability"),
                         PriorityFromOrders(Field(w, "orders"), n, m)});
    }
    return TieBreakingRule::Randomized(std::move(mixture));
  }
  return PriorityFromOrders(Field(j, "orders"), n, m);
}

Json ToJson(const Game& game) {
  Json j;
  j["m"] = game.m();
  j["valuations"] = Json::array();
  for (const Valuation& v : game.valuations) j["valuations"].push_back(ToJson(v));
  j["tie_rule"] = ToJson(game.rule);
  return j;
}

Game GameFromJson(const Json& j) {
  const int m = As<int>(Field(j, "m"), "m");
  Game g;
  for (const Json& v : Field(j, "valuations")) g.valuations.push_back(ValuationFromJson(v, m));
  if (g.valuations.empty()) Fail(ErrorKind::kUsage, "game has no valuations");
  g.rule = j.contains("tie_rule") ? TieRuleFromJson(j.at("tie_rule"), g.n(), m)
                                  : TieBreakingRule::ByIndex(g.n(), m);
  g.Validate();
  return g;
}

Json ToJson(const Allocation& a) { return a.owner; }

Json ToJson(const BidProfile& b) {
  Json rows = Json::array();
  for (int i = 0; i < b.n(); ++i) {
    rows.push_back(std::vector<Money>(b.row(i).begin(), b.row(i).end()));
  }
  return rows;
}

Json ToJson(const Outcome& o) {
  Json j;
  j["utilities"] = o.utilities;
  j["item_prices"] = o.item_prices;
  j["welfare"] = o.welfare;
  j["revenue"] = o.revenue;
  j["branches"] = Json::array();
  for (const OutcomeBranch& b : o.branches) {
    j["branches"].push_back({{"probability", b.probability},
                             {"allocation", ToJson(b.allocation)},
                             {"utilities", b.utilities},
                             {"welfare", b.welfare},
                             {"revenue", b.revenue}});
  }
  return j;
}

Json ToJson(const Estimate& e) {
  return {{"mean", Number(e.mean)}, {"ci99_half_width", Number(e.ci_half_width)},
          {"samples", e.samples}};
}

Json ToJson(const FiniteStrategy& s) { return {{"bids", s.bids}, {"probs", s.probs}}; }

FiniteStrategy FiniteStrategyFromJson(const Json& j, int m) {
  FiniteStrategy s;
  if (j.is_array()) {
    s = FiniteStrategy::Pure(MoneyVector(j, "bid vector"));
  } else {
    s.bids = As<std::vector<BidVector>>(Field(j, "bids"), "bids");
    s.probs = As<std::vector<double>>(Field(j, "probs"), "probs");
  }
  s.Validate(m);
  return s;
}

FiniteBayesianGame BayesGameFromJson(const Json& j) {
  const int m = As<int>(Field(j, "m"), "m");
  FiniteBayesianGame bg;
  for (const Json& player : Field(j, "types")) {
    std::vector<Valuation> types;
    for (const Json& v : player) types.push_back(ValuationFromJson(v, m));
    bg.types.push_back(std::move(types));
  }
  for (const Json& e : Field(j, "prior")) {
    bg.prior.push_back({As<std::vector<int>>(Field(e, "types"), "prior types"),
                        As<double>(Field(e, "probability"), "prior probability")});
  }
  bg.product = j.value("product", false);
  bg.rule = j.contains("tie_rule") ? TieRuleFromJson(j.at("tie_rule"), bg.n(), m)
                                   : TieBreakingRule::ByIndex(bg.n(), m);
  bg.Validate();
  return bg;
}

BayesProfile BayesProfileFromJson(const Json& j, const FiniteBayesianGame& bg) {
  BayesProfile p;
  for (const Json& player : j) {
    std::vector<FiniteStrategy> per_type;
    for (const Json& s : player) per_type.push_back(FiniteStrategyFromJson(s, bg.m()));
    p.push_back(std::move(per_type));
  }
  return p;
}

Json ToJson(const FiniteBayesianGame& bg) {
  Json j;
  j["m"] = bg.m();
  j["types"] = Json::array();
  for (const auto& player : bg.types) {
    Json t = Json::array();
    for (const Valuation& v : player) t.push_back(ToJson(v));
    j["types"].push_back(t);
  }
  j["prior"] = Json::array();
  for (const PriorEntry& e : bg.prior) {
    j["prior"].push_back({{"types", e.types}, {"probability", e.probability}});
  }
  j["product"] = bg.product;
  j["tie_rule"] = ToJson(bg.rule);
  return j;
}

SingleMindedInstance InstanceFromJson(const Json& j) {
  SingleMindedInstance inst;
  inst.m = As<int>(Field(j, "m"), "m");
  inst.value = As<Money>(Field(j, "value"), "value");
  for (const Json& b : Field(j, "bundles")) inst.bundles.push_back(ItemsFromJson(b, inst.m));
  return inst;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kUsage, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorKind::kUsage, "cannot parse " + path + ": " + e.what());
  }
}

}  // namespace sfpa
