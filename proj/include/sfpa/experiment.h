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

#ifndef SFPA_EXPERIMENT_H_
#define SFPA_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sfpa/json_io.h"

namespace sfpa {

inline constexpr char kVersion[] = "sfpa 0.1.0";

// One experiment: a command, a game source, and numeric parameters.
struct ExperimentSpec {
  std::string command = "verify";  // verify | walrasian | pure-nash | poa | dynamics | bayes | sample
  // Builtin name (andor, triangle, single_minded, grid), a call form such as
  // "andor(4,0.5)", or a path to a JSON game file.
  std::string game = "andor";
  // verify: closed-form name matching the game, or a JSON strategy file.
  std::string strategy;
  int m = 2;
  double v = 1.0;
  int k = 2;
  int d = 2;
  int l = 3;
  std::string instance = "triangle";  // single_minded instance: triangle | grid | file
  double grid_step = 0.001;
  int64_t trials = 100000;
  int64_t rounds = 1000;
  uint64_t seed = 1;
  double tolerance = 1e-6;
  std::string tie_rule = "index";  // index | reverse | random | orders like "1,0"
  std::string out;                 // empty = stdout
  std::string format = "json";     // json | csv
  std::string trace;               // dynamics: optional per-round CSV path

  Json ToJson() const;
  // Keys present in `j` override the fields of `base`.
  static ExperimentSpec FromJson(const Json& j, ExperimentSpec base);
  // Throws kUsage on non-positive numbers or unknown names.
  void Validate() const;
};

struct SeriesPoint {
  std::string series;
  double x = 0.0;
  double y = 0.0;
};

struct Report {
  Json spec;
  Json results;
  std::vector<SeriesPoint> series;
  std::optional<Json> error;  // {"kind", "message"} on failure
  double wall_clock_seconds = 0.0;

  // Everything except the wall clock; byte-identical for equal spec and seed.
  std::string Body() const;
  Json ToJson() const;
};

// Dispatches to the library; never throws. Failures land in `error`.
Report RunExperiment(const ExperimentSpec& spec);

// Exit status for a report: 0 ok, 1 usage, 2 cap or precondition, 3 internal.
int ExitCode(const Report& report);

// Long-format CSV "series,x,y"; a header only when there is no series.
void WritePlotCsv(const Report& report, std::ostream& out);

}  // namespace sfpa

#endif  // SFPA_EXPERIMENT_H_
