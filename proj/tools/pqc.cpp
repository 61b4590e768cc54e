// Copyright 2026 The pqc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pqc/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pqc: parametric quantum channels, distances, and min-max tuning"};
  app.require_subcommand(1);

  std::string validate_path;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check an experiment config or serialized channel file");
  validate->add_option("config", validate_path, "config or channel JSON file")->required();

  std::string sweep_config;
  std::optional<std::size_t> sweep_grid;
  std::optional<std::string> sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep", "Grid sweep of the mixture parameter");
  sweep->add_option("config", sweep_config, "experiment config JSON")->required();
  sweep->add_option("--grid", sweep_grid, "number of grid points (overrides config)");
  sweep->add_option("--out", sweep_out, "output CSV path (overrides config)");

  std::string opt_config;
  std::optional<std::string> opt_out;
  CLI::App* optimize =
      app.add_subcommand("optimize", "Minimize the certified worst-case cost over w1");
  optimize->add_option("config", opt_config, "experiment config JSON")->required();
  optimize->add_option("--out", opt_out, "output JSON path (overrides config)");

  std::string dist_a, dist_b;
  std::int64_t dist_max_ext = 0;
  std::optional<std::string> dist_out;
  int dist_restarts = 0;
  std::uint64_t dist_seed = 1;
  CLI::App* distance =
      app.add_subcommand("distance", "Per-extension costs and diamond lower bound");
  distance->add_option("channel_a", dist_a, "first channel JSON file")->required();
  distance->add_option("channel_b", dist_b, "second channel JSON file")->required();
  distance->add_option("--max-ext", dist_max_ext, "largest extension dim (default: system dim)");
  distance->add_option("--out", dist_out, "also write results to this JSON file");
  distance->add_option("--restarts", dist_restarts, "ascent restarts per extension");
  distance->add_option("--seed", dist_seed, "base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pqc::kExitUsage;
  }

  try {
    if (validate->parsed()) return pqc::run_validate(validate_path, std::cout);
    if (sweep->parsed()) return pqc::run_sweep(sweep_config, sweep_grid, sweep_out, std::cout);
    if (optimize->parsed()) return pqc::run_optimize(opt_config, opt_out, std::cout);
    if (distance->parsed()) {
      pqc::AscentConfig cfg;
      if (dist_restarts > 0) cfg.restarts = dist_restarts;
      cfg.seed = dist_seed;
      return pqc::run_distance(dist_a, dist_b, dist_max_ext, dist_out, cfg, std::cout);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pqc::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pqc::kExitDomain;
  }
  return pqc::kExitUsage;
}
