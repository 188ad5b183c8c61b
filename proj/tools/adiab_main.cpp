// Copyright 2026 The adiab Authors
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
#include <string>

#include <CLI11.hpp>

#include "adiab/config.hpp"
#include "adiab/errors.hpp"
#include "adiab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic expansion and tunneling statistics for linear SDEs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, epsilons;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--out", out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads (0 = all cores)");
  app.add_option("--epsilons", epsilons, "Comma-separated eps list, overrides the config");

  for (const char* name : {"verify", "tunneling", "expansion", "convergence", "selftest"}) {
    app.add_subcommand(name);
  }
  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    adiab::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = adiab::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (*seed_opt) cfg.seed = seed;
    if (*workers_opt) cfg.workers = workers;
    if (!epsilons.empty()) cfg.epsilons = adiab::parse_epsilon_list(epsilons);
    adiab::validate(cfg);
    return adiab::run(sub, cfg, std::cout);
  } catch (const adiab::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
