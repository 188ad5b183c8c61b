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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adiab/brownian.hpp"
#include "adiab/linalg.hpp"

namespace adiab {

/// Declared measurability of a grid process. Integrators check the tag; it
/// is never inferred from the values.
enum class Adaptation { Forward, Backward, TwoSided, Deterministic };

/// Grid-indexed process X_i at s_i = i/M, i = 0..M. Scalars are 1x1,
/// vectors d x 1.
struct GridProcess {
  std::vector<Matrix> values;
  Adaptation adaptation = Adaptation::Forward;

  std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }

  static GridProcess deterministic(std::size_t steps, const std::function<Matrix(double)>& f);
  static GridProcess constant(std::size_t steps, const Matrix& c);
};

/// sum_i X_{i-1} dB_i (left endpoints). Throws AdaptationMismatch for a
/// backward-adapted integrand and GridMismatch for a foreign grid.
Matrix forward_ito(const GridProcess& x, const BrownianPath& path);

/// sum_i Y_i dB_i (right endpoints). Throws AdaptationMismatch for a
/// forward-adapted integrand.
Matrix backward_ito(const GridProcess& y, const BrownianPath& path);

enum class IntegralKind { Forward, Backward };

using ProcessSampler = std::function<GridProcess(const BrownianPath&)>;

struct AuditOptions {
  std::size_t steps = 1000;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  /// Path p uses stream_id = stream_offset + p.
  std::uint64_t stream_offset = 0;
  std::size_t workers = 1;
  IntegralKind kind = IntegralKind::Forward;
};

struct IsometryAudit {
  double mean_err = 0.0;
  double mean_stderr = 0.0;
  /// E||int X dB||^2 / int E||X||^2 ds; NaN when the integrand vanishes.
  double ratio = 0.0;
  double ratio_stderr = 0.0;
  double integrand_energy = 0.0;
  bool degenerate = false;
};

IsometryAudit isometry_audit(const ProcessSampler& sampler, const AuditOptions& opt);

/// E||int X dB||^{2n} <= (2n^2 - n)^n E int ||X||^{2n} ds.
struct MomentBoundAudit {
  int n = 1;
  double constant = 1.0;
  double lhs = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  double rhs_stderr = 0.0;
  bool satisfied = false;
};

MomentBoundAudit moment_bound_audit(const ProcessSampler& sampler, int n,
                                    const AuditOptions& opt);

/// Prob(||int X dB||^2 > gamma) <= exp(-gamma / (8 ||X||_inf^2) + 1/4).
struct TailBoundRow {
  double gamma = 0.0;
  double empirical = 0.0;
  double stderr_empirical = 0.0;
  double bound = 0.0;
  bool satisfied = false;
};

/// Throws MissingSupBound when `sup_norm` is not provided.
std::vector<TailBoundRow> tail_bound_audit(const ProcessSampler& sampler,
                                           const std::vector<double>& gammas,
                                           std::optional<double> sup_norm,
                                           const AuditOptions& opt);

/// One CSV row: audit_name, n_or_gamma, lhs, rhs, stderr, satisfied.
struct AuditRow {
  std::string audit_name;
  double n_or_gamma = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double stderr_value = 0.0;
  bool satisfied = false;
};

AuditRow to_row(const std::string& name, const IsometryAudit& a);
AuditRow to_row(const std::string& name, const MomentBoundAudit& a);
AuditRow to_row(const std::string& name, const TailBoundRow& a);
void write_audit_csv(std::ostream& out, const std::vector<AuditRow>& rows);

}  // namespace adiab
