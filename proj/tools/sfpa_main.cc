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

// Command-line front end: parses flags and an optional JSON config (config
// values win over flags), runs one experiment, and writes a JSON report or
// plot CSV.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sfpa/experiment.h"

namespace {

void AddCommonFlags(CLI::App* cmd, sfpa::ExperimentSpec* spec, std::string* config) {
  cmd->add_option("--game", spec->game, "builtin (andor, triangle, single_minded, grid) or JSON file");
  cmd->add_option("--strategy", spec->strategy, "closed-form name or JSON strategy file");
  cmd->add_option("--m", spec->m, "items in the AND-OR game");
  cmd->add_option("--v", spec->v, "OR value in the AND-OR game");
  cmd->add_option("--k", spec->k, "bundle size for single-minded bidders");
  cmd->add_option("--d", spec->d, "bidders per item for single-minded bidders");
  cmd->add_option("--l", spec->l, "side of the grid game");
  cmd->add_option("--instance", spec->instance, "single-minded instance: triangle, grid, or file");
  cmd->add_option("--grid-step", spec->grid_step, "bid grid step");
  cmd->add_option("--trials", spec->trials, "Monte Carlo trials");
  cmd->add_option("--rounds", spec->rounds, "learning rounds");
  cmd->add_option("--seed", spec->seed, "root random seed");
  cmd->add_option("--tolerance", spec->tolerance, "equilibrium tolerance");
  cmd->add_option("--tie-rule", spec->tie_rule, "index, reverse, random, or an order like 1,0");
  cmd->add_option("--out", spec->out, "output path (default stdout)");
  cmd->add_option("--format", spec->format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--trace", spec->trace, "dynamics: per-round CSV path");
  cmd->add_option("--config", *config, "JSON config; its keys override flags");
}

int Emit(const sfpa::ExperimentSpec& spec, const sfpa::Report& report) {
  std::ofstream file;
  if (!spec.out.empty()) {
    file.open(spec.out);
    if (!file) {
      std::cerr << "cannot write " << spec.out << "\n";
      return 1;
    }
  }
  std::ostream& out = spec.out.empty() ? std::cout : file;
  if (spec.format == "csv" && !report.error) {
    sfpa::WritePlotCsv(report, out);
  } else {
    out << report.ToJson().dump(2) << "\n";
  }
  if (report.error) std::cerr << "error: " << report.error->at("message").get<std::string>() << "\n";
  return sfpa::ExitCode(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous first-price auction experiments"};
  app.require_subcommand(1);
  sfpa::ExperimentSpec spec;
  std::string config;
  const std::pair<const char*, const char*> commands[] = {
      {"verify", "Best-response gaps of a strategy profile on a bid grid"},
      {"walrasian", "Walrasian equilibrium search and optimal welfare"},
      {"pure-nash", "Pure equilibria on a grid, fixed or any priority rule"},
      {"poa", "Equilibrium welfare and price-of-anarchy estimates"},
      {"dynamics", "No-regret learning, CCE check, and welfare bounds"},
      {"bayes", "Bayesian gaps and welfare bounds for finite type spaces"},
      {"sample", "Sample closed-form strategies and compare with their CDFs"},
  };
  for (const auto& [name, help] : commands) {
    AddCommonFlags(app.add_subcommand(name, help), &spec, &config);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  spec.command = app.get_subcommands().front()->get_name();
  try {
    if (!config.empty()) spec = sfpa::ExperimentSpec::FromJson(sfpa::ReadJsonFile(config), spec);
  } catch (const sfpa::Error& e) {
    sfpa::Report report;
    report.spec = spec.ToJson();
    report.error = sfpa::Json{{"kind", "usage"}, {"message", e.what()}};
    return Emit(spec, report);
  }
  return Emit(spec, sfpa::RunExperiment(spec));
}
