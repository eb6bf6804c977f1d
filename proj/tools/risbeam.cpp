// SPDX-License-Identifier: Apache-2.0
//
// risbeam - lookup-table constrained beam pattern synthesis for reflective RISs
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "risbeam/cli_runner.hpp"

namespace cli = risbeam::cli;

int main(int argc, char** argv) {
  CLI::App app{"risbeam: RIS beam pattern synthesis under lookup-table constraints"};
  app.require_subcommand(1);

  std::string config;
  cli::CommonFlags flags;
  std::string out_prefix;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "Scenario JSON file");
  auto* prefix_opt = app.add_option("--out-prefix", out_prefix, "Output path prefix");
  auto* seed_opt = app.add_option("--seed", seed, "Solver seed");
  app.add_flag("--quiet", flags.quiet, "Suppress progress output");

  auto* synth = app.add_subcommand("synthesize", "Optimize a configuration for a scenario");

  auto* eval = app.add_subcommand("evaluate", "Evaluate a configuration on a 2D angle grid");
  std::string omega_path;
  cli::GridFlags grid_flags;
  double grid_step = 0.0;
  eval->add_option("omega", omega_path, "Omega CSV (m,re,im,table_index)")->required();
  auto* step_opt = eval->add_option("--grid-step", grid_step, "Grid spacing in degrees");
  eval->add_flag("--check-feasible", grid_flags.check_feasible,
                 "Fail with exit 5 if omega has entries outside the table");

  auto* proj = app.add_subcommand("project", "Project complex values onto a lookup table");
  std::string input, output, table_spec;
  int levels = 0;
  proj->add_option("input", input, "CSV of complex values")->required();
  proj->add_option("--table", table_spec, "Table id (V, K1, K2, UNIT, SUNIT2) or CSV path")
      ->required();
  proj->add_option("--levels", levels, "Levels for UNIT / SUNIT2");
  proj->add_option("-o,--output", output, "Output omega CSV")->required();

  auto* tables = app.add_subcommand("tables", "Inspect built-in lookup tables");
  tables->require_subcommand(1);
  auto* list = tables->add_subcommand("list", "List built-in tables");
  auto* show = tables->add_subcommand("show", "Print a table as re,im CSV");
  std::string show_id;
  int show_levels = 0;
  show->add_option("id", show_id, "Table id or CSV path")->required();
  show->add_option("--levels", show_levels, "Levels for UNIT / SUNIT2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }
  if (*prefix_opt) flags.out_prefix = out_prefix;
  if (*seed_opt) flags.seed = seed;
  if (*step_opt) grid_flags.step_deg = grid_step;

  auto need_config = [&]() -> bool {
    if (config.empty()) {
      std::cerr << "config error: --config is required\n";
      return false;
    }
    return true;
  };

  if (*synth) {
    if (!need_config()) return cli::kConfigError;
    return cli::run_synthesize(config, flags, std::cout, std::cerr);
  }
  if (*eval) {
    if (!need_config()) return cli::kConfigError;
    return cli::run_evaluate(omega_path, config, flags, grid_flags, std::cout, std::cerr);
  }
  if (*proj) {
    return cli::run_project(input, table_spec, levels, output, flags, std::cout, std::cerr);
  }
  if (*list) {
    cli::list_tables(std::cout);
    return cli::kOk;
  }
  if (*show) return cli::show_table(show_id, show_levels, std::cout, std::cerr);
  return cli::kConfigError;
}
