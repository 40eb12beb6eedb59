/*
   Copyright 2026 The pseudostop Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// pstlab: run one experiment from the registry and write its CSV report.
//
//   pstlab williams --lambda 1 --n-paths 20000 --seed 7 -o williams.csv
//   pstlab coin --p 2 --K 16
//
// Exit codes: 0 all gating checks pass, 1 a check failed, 2 bad config, 3 internal error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pst/config_file.hpp"
#include "pst/lab.hpp"

namespace {

int run(int argc, char** argv) {
  CLI::App app{"pseudo-stopping time verification lab"};
  std::string experiment;
  std::string config_path;
  pst::ExperimentConfig flags;
  double prune_eps = 0.0;
  bool list = false;
  bool grid_only = false;

  app.add_option("experiment", experiment, "experiment id");
  app.add_option("--config", config_path, "JSON config file; flags override it");
  auto* o_seed = app.add_option("--seed", flags.seed);
  auto* o_n = app.add_option("--n-paths", flags.n_paths);
  auto* o_dt = app.add_option("--dt", flags.dt);
  auto* o_max = app.add_option("--max-steps", flags.max_steps);
  auto* o_lambda = app.add_option("--lambda", flags.lambdas, "one or more lambda values")
                       ->delimiter(',');
  auto* o_levels = app.add_option("--levels", flags.levels, "stopping levels in (0, 1)")
                       ->delimiter(',');
  auto* o_eps = app.add_option("--prune-eps", prune_eps);
  auto* o_p = app.add_option("--p", flags.p)->delimiter(',');
  auto* o_k = app.add_option("--K", flags.K)->delimiter(',');
  auto* o_out = app.add_option("-o,--output", flags.output, "CSV path (default stdout)");
  auto* o_workers = app.add_option("--workers", flags.workers);
  auto* o_budget = app.add_option("--step-budget", flags.step_budget);
  auto* o_terms = app.add_option("--random-terminals", flags.random_terminals);
  auto* o_grid = app.add_flag("--grid-only", grid_only, "disable bridge refinement");
  auto* o_wall = app.add_flag("--record-wall-time", flags.record_wall_time);
  app.add_flag("--list", list, "print the experiment registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (list) {
    for (const auto& id : pst::registry()) std::cout << id << '\n';
    return 0;
  }

  try {
    pst::ExperimentConfig cfg;
    if (!config_path.empty()) pst::load_config_file(cfg, config_path);
    if (!experiment.empty()) cfg.experiment = experiment;
    if (o_seed->count()) cfg.seed = flags.seed;
    if (o_n->count()) cfg.n_paths = flags.n_paths;
    if (o_dt->count()) cfg.dt = flags.dt;
    if (o_max->count()) cfg.max_steps = flags.max_steps;
    if (o_lambda->count()) cfg.lambdas = flags.lambdas;
    if (o_levels->count()) cfg.levels = flags.levels;
    if (o_eps->count()) cfg.prune_eps = prune_eps;
    if (o_p->count()) cfg.p = flags.p;
    if (o_k->count()) cfg.K = flags.K;
    if (o_out->count()) cfg.output = flags.output;
    if (o_workers->count()) cfg.workers = flags.workers;
    if (o_budget->count()) cfg.step_budget = flags.step_budget;
    if (o_terms->count()) cfg.random_terminals = flags.random_terminals;
    if (o_grid->count()) cfg.bridge = !grid_only;
    if (o_wall->count()) cfg.record_wall_time = flags.record_wall_time;
    if (cfg.experiment.empty()) throw pst::ConfigError("no experiment given (see --list)");
    pst::validate(cfg);

    pst::Lab lab(cfg);
    const auto rows = lab.run();
    if (cfg.output.empty()) {
      pst::write_csv(std::cout, rows);
    } else {
      std::ofstream out(cfg.output);
      if (!out) throw pst::ConfigError("cannot write " + cfg.output);
      pst::write_csv(out, rows);
    }
    return pst::all_passed(rows) ? 0 : 1;
  } catch (const pst::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pst::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
