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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "adiab/config.hpp"
#include "adiab/stats.hpp"

namespace adiab {

struct AuditEntry {
  std::string name;
  bool pass = false;
  double estimate = 0.0;
  double threshold = 0.0;
  double stderr_value = 0.0;
};

/// Each subcommand writes its data files into cfg.out_dir and returns the
/// audit verdicts.
std::vector<AuditEntry> run_verify(const ExperimentConfig& cfg);
std::vector<AuditEntry> run_tunneling(const ExperimentConfig& cfg);
std::vector<AuditEntry> run_expansion(const ExperimentConfig& cfg);
std::vector<AuditEntry> run_convergence(const ExperimentConfig& cfg);
std::vector<AuditEntry> run_selftest(const ExperimentConfig& cfg);

std::string audits_json(const std::string& subcommand, const std::vector<AuditEntry>& audits);

/// Dispatches, writes audits.json and returns the exit code (0 iff every
/// audit passed). Progress lines go to `log`.
int run(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log);

struct ConversionStudy {
  std::vector<double> eps;
  std::vector<double> mean;
  std::vector<double> stderr_mean;
  ConvergenceFit fit;
};

/// Mean per-path discrepancy between the backward integral of L2 b_1 and its
/// forward conversion, with common random numbers across eps.
ConversionStudy conversion_study(const DephasingModel& model, const std::vector<double>& eps_list,
                                 std::size_t paths, std::uint64_t seed,
                                 std::size_t steps_per_epsilon, std::size_t workers);

}  // namespace adiab
