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

#pragma once

// JSON configuration files. Keys mirror ExperimentConfig field names; any
// key left out keeps its default, and unknown keys are rejected.

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "pst/errors.hpp"
#include "pst/lab.hpp"

namespace pst {

inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "experiment", "seed",         "n_paths",     "dt",          "max_steps",
      "lambdas",    "levels",       "prune_eps",   "p",           "K",
      "output",     "workers",      "bridge",      "record_wall_time",
      "step_budget", "random_terminals", "terminal_steps"};
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  try {
    const auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("experiment", c.experiment);
    get("seed", c.seed);
    get("n_paths", c.n_paths);
    get("dt", c.dt);
    get("max_steps", c.max_steps);
    get("lambdas", c.lambdas);
    get("levels", c.levels);
    if (j.contains("prune_eps")) c.prune_eps = j.at("prune_eps").get<double>();
    get("p", c.p);
    get("K", c.K);
    get("output", c.output);
    get("workers", c.workers);
    get("bridge", c.bridge);
    get("record_wall_time", c.record_wall_time);
    get("step_budget", c.step_budget);
    get("random_terminals", c.random_terminals);
    get("terminal_steps", c.terminal_steps);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

inline void load_config_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  apply_json(c, j);
}

}  // namespace pst
