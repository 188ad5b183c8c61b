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
#include <vector>

#include "adiab/brownian.hpp"
#include "adiab/linalg.hpp"
#include "adiab/propagator.hpp"
#include "adiab/stats.hpp"

namespace adiab {

inline constexpr std::size_t kMaxExpansionOrder = 3;

struct TransportTrajectory {
  std::size_t steps = 0;
  /// T[i] approximates T(s_i, 0).
  std::vector<Matrix> T;
  std::vector<Matrix> P;
  /// [P'(s_i), P(s_i)].
  std::vector<Matrix> generator;
  double intertwining_error = 0.0;
};

/// Integrates T' = [P', P] T with classical RK4 on a uniform grid.
TransportTrajectory parallel_transport(const OperatorFamily& p_family, std::size_t steps,
                                       double projection_tol = 1e-8);

/// s -> kernel projection of l1(s).
OperatorFamily kernel_projection_family(const OperatorFamily& l1, double gap_tol = kDefaultGapTol);

struct ExpansionCoefficients {
  std::size_t order = 1;
  std::size_t steps = 0;
  /// a[n][i] for n = 0..order.
  std::vector<std::vector<Vector>> a;
  /// b[n][i] for n = 0..order+1, b[0] identically zero.
  std::vector<std::vector<Vector>> b;
  std::vector<Matrix> P;
  TransportTrajectory transport;

  /// sum_{n <= order} eps^n (a_n(0) + b_n(0)).
  Vector slow_manifold_initial(double eps) const;
};

/// a_init[n] is a_n(0); missing orders default to zero.
ExpansionCoefficients expansion_coefficients(const OperatorFamily& l1,
                                             const std::vector<Vector>& a_init, std::size_t order,
                                             std::size_t steps, double gap_tol = kDefaultGapTol);

struct ExpansionEvaluation {
  double eps = 0.0;
  std::size_t order = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  /// deterministic[n][i] = a_n(s_i) + b_n(s_i).
  std::vector<std::vector<Vector>> deterministic;
  /// stochastic[n][i] = int_0^{s_i} U(s_i, s') L2(s') b_n(s') dB_{s'}.
  std::vector<std::vector<Vector>> stochastic;
  std::vector<Vector> X;
};

/// Truncation defaults to the coefficient order.
ExpansionEvaluation evaluate_expansion(const ExpansionCoefficients& coeffs,
                                       const StepGenerator& gen, const BrownianPath& path,
                                       const PropagatorTrajectory& traj,
                                       std::size_t truncation = kMaxExpansionOrder + 1);

using GeneratorFactory = std::function<StepGenerator(double eps, std::size_t steps)>;

struct RemainderOptions {
  std::vector<double> eps_list;
  std::size_t order = 1;
  std::size_t paths = 500;
  std::uint64_t seed = 1;
  std::size_t steps_per_epsilon = 200;
  std::size_t workers = 1;
  Scheme scheme = Scheme::Exponential;
  double gap_tol = kDefaultGapTol;
};

struct RemainderStudy {
  std::vector<double> eps;
  std::vector<std::size_t> steps;
  /// mean[n][e], stderr[n][e]: sup-norm remainder of the order-n truncation.
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> stderr_mean;
  std::vector<ConvergenceFit> fits;
};

/// Common random numbers: every path is drawn on the finest grid and
/// coarsened for the larger eps values. Simulations start on the slow
/// manifold of the requested order.
RemainderStudy remainder_scaling(const OperatorFamily& l1, const OperatorFamily& l2,
                                 const std::vector<Vector>& a_init, const RemainderOptions& opt,
                                 const GeneratorFactory& factory = {});

/// Columns: index, s, then a<n>_<c>_re, a<n>_<c>_im, b<n>_<c>_re, b<n>_<c>_im.
void write_coefficients_csv(std::ostream& out, const ExpansionCoefficients& coeffs);

}  // namespace adiab
