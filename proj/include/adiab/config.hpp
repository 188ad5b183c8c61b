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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "adiab/dephasing.hpp"
#include "adiab/propagator.hpp"

namespace adiab {

struct ExperimentConfig {
  /// rotating_dephasing, three_level or table.
  std::string model = "rotating_dephasing";
  /// Numeric model parameters (energy, gamma, rate, a, b, e1, g1, e2, g2).
  std::map<std::string, double> model_params;
  /// Table models: knots as whitespace-separated re/im pairs, row-major.
  std::vector<Matrix> table_h;
  std::vector<Matrix> table_g;
  double commutation_tol = 1e-6;

  std::vector<double> epsilons{0.05};
  std::size_t steps_per_epsilon = 200;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  std::size_t order = 1;
  Scheme scheme = Scheme::Exponential;
  std::filesystem::path out_dir = "out";
  std::size_t workers = 0;

  /// Stochastic-calculus audits in `verify`.
  std::size_t verify_paths = 4000;
  std::size_t verify_steps = 1000;
  /// Paths per eps in `convergence`.
  std::size_t convergence_paths = 200;
  /// Paths per eps in `expansion`.
  std::size_t expansion_paths = 20;

  DephasingModel build_model() const;
};

/// Throws ConfigInvalid naming the offending key.
void validate(const ExperimentConfig& cfg);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Comma-separated list of doubles; throws ConfigInvalid("epsilon ...").
std::vector<double> parse_epsilon_list(const std::string& text);

}  // namespace adiab
