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
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "adiab/brownian.hpp"
#include "adiab/ito.hpp"
#include "adiab/linalg.hpp"

namespace adiab {

enum class Scheme { EulerMaruyama, Exponential };

const char* to_string(Scheme scheme);

struct SchemeConfig {
  Scheme scheme = Scheme::Exponential;
  /// Grid constraint M >= K / eps.
  std::size_t steps_per_epsilon = 200;
  double tol_growth = 10.0;
};

/// Smallest M with M * eps >= K.
std::size_t required_steps(double eps, std::size_t steps_per_epsilon);

/// Throws GridTooCoarse when the path violates M >= K / eps.
void check_grid_constraint(double eps, const BrownianPath& path, const SchemeConfig& cfg);

/// Generator data of eps dX = L1 X ds + sqrt(eps) L2 X dB sampled on the
/// grid s_i = i/M, and the one-step maps built from it.
///
/// Two representations: general matrices (L1_i, L2_i), or a shared
/// orthonormal eigenbasis with L1 = -(iH + G^2/2), L2 = -iG for commuting
/// Hermitian H, G. The second gives exactly unitary exponential steps.
class StepGenerator {
 public:
  static StepGenerator sample(const OperatorFamily& l1, const OperatorFamily& l2, double eps,
                              std::size_t steps);

  /// basis[i] columns are the joint eigenvectors at s_i, energies[i] and
  /// couplings[i] the eigenvalues of H(s_i) and G(s_i).
  static StepGenerator spectral(std::vector<Matrix> basis, std::vector<Eigen::VectorXd> energies,
                                std::vector<Eigen::VectorXd> couplings, double eps);

  std::size_t steps() const { return steps_; }
  std::size_t dim() const { return dim_; }
  double eps() const { return eps_; }
  double dt() const { return 1.0 / static_cast<double>(steps_); }
  bool is_spectral() const { return spectral_; }

  Matrix l1(std::size_t sample) const;
  Matrix l2(std::size_t sample) const;

  /// One-step propagator over an interval of length dt with increment dB,
  /// coefficients frozen at grid point `sample`.
  ///   exponential:    exp(L1 dt/eps - L2^2 dt/(2 eps) + L2 dB/sqrt(eps))
  ///   Euler-Maruyama: I + L1 dt/eps + L2 dB/sqrt(eps)
  Matrix step(std::size_t sample, double dB, Scheme scheme) const;

  /// Step of the inverse equation eps dU^{-1} = U^{-1}(-dL + L2^2 ds). For the
  /// exponential scheme this is the exact inverse of step().
  Matrix inverse_step(std::size_t sample, double dB, Scheme scheme) const;

  /// Step of the noiseless equation eps dV = L1 V ds.
  Matrix deterministic_step(std::size_t sample, Scheme scheme) const;

  /// step(sample, dB, scheme) * x without forming the matrix when spectral.
  Vector apply(std::size_t sample, double dB, Scheme scheme, const Vector& x) const;

 private:
  std::size_t steps_ = 0;
  std::size_t dim_ = 0;
  double eps_ = 1.0;
  bool spectral_ = false;
  std::vector<Matrix> l1_, l2_, drift_;  // drift = L1 - L2^2 / 2
  std::vector<Matrix> basis_;
  std::vector<Eigen::VectorXd> energies_, couplings_;
};

/// Grid-indexed U_i ~ U_eps(s_i, 0) (forward) or U_i ~ U_eps(s_fixed, s_i)
/// (backward, entries above s_fixed are identity).
struct PropagatorTrajectory {
  double eps = 1.0;
  Scheme scheme = Scheme::Exponential;
  std::size_t steps = 0;
  double dt = 0.0;
  bool backward = false;
  std::size_t s_fixed_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::vector<Matrix> U;
  /// steps[i] maps s_i to s_{i+1} (forward trajectories).
  std::vector<Matrix> step_matrices;
  /// Stepped U_i^{-1} (forward trajectories, when requested).
  std::vector<Matrix> inverse;
};

struct PropagateOptions {
  bool keep_steps = true;
  bool keep_inverse = false;
};

PropagatorTrajectory propagate_forward(const StepGenerator& gen, const BrownianPath& path,
                                       const SchemeConfig& cfg, const PropagateOptions& opt = {});
PropagatorTrajectory propagate_forward(const OperatorFamily& l1, const OperatorFamily& l2,
                                       double eps, const BrownianPath& path,
                                       const SchemeConfig& cfg, const PropagateOptions& opt = {});

/// U(s_fixed, s_i) for s_i <= s_fixed by right-endpoint stepping backward:
/// U(s, s_i) = U(s, s_{i+1}) * step(coefficients at s_{i+1}).
PropagatorTrajectory propagate_backward(const StepGenerator& gen, double s_fixed,
                                        const BrownianPath& path, const SchemeConfig& cfg);
PropagatorTrajectory propagate_backward(const OperatorFamily& l1, const OperatorFamily& l2,
                                        double eps, double s_fixed, const BrownianPath& path,
                                        const SchemeConfig& cfg);

/// max_i ||U_i - U(s_i, s') U(s', 0)|| over i >= s', with U(s_i, s') re-stepped
/// from the stored step matrices.
double semigroup_audit(const PropagatorTrajectory& traj, std::size_t split_index);

/// ||U(1,0) - V(1,0) - eps^{-1/2} sum_j U(1,s_j) L2(s_j) V(s_j,0) dB_j|| with V
/// the deterministic propagator of L1/eps stepped by the same scheme.
double duhamel_audit(const StepGenerator& gen, const BrownianPath& path, const SchemeConfig& cfg);
double duhamel_audit(const OperatorFamily& l1, const OperatorFamily& l2, double eps,
                     const BrownianPath& path, const SchemeConfig& cfg);

struct ContractionAudit {
  double max_norm = 0.0;
  double threshold = 0.0;
  bool violated = false;
};

/// Checks Re(L1 - L2^2/2) <= 0 and iL2 Hermitian on the grid (throws
/// AssumptionAViolated otherwise), then compares max ||U_i|| against
/// 1 + tol_growth * dt * M.
ContractionAudit contraction_audit(const PropagatorTrajectory& traj, const StepGenerator& gen,
                                   const SchemeConfig& cfg);

enum class Quadrature { Riemann, Milstein };

/// J_i = int_0^{s_i} U(s_i, s') f(s') dB_{s'} on every grid point, with U(s_i, s')
/// the grid propagator of `traj` and right-endpoint evaluation. The Milstein
/// variant adds the within-step term (L2/sqrt(eps)) f (dB^2 - dt)/2.
std::vector<Vector> backward_propagated_integral(const PropagatorTrajectory& traj,
                                                 const StepGenerator& gen,
                                                 const std::vector<Vector>& f,
                                                 const BrownianPath& path, Quadrature q);

struct ConversionResult {
  Vector backward_value;
  Vector forward_value;
  double discrepancy = 0.0;
};

/// Backward integral int_0^s U(s,s') f(s') dB against the forward form
/// U(s,0) int_0^s U(s',0)^{-1} f~(s') dB with
/// f~ = [1 + L2 (L1 - L2^2)^{-1} L2] f and U^{-1} stepped. The resolvent is a
/// minimum-norm least-squares solve; SingularConversion when its residual is
/// not small.
ConversionResult backward_to_forward(const GridProcess& f, const StepGenerator& gen,
                                     const BrownianPath& path, const SchemeConfig& cfg,
                                     Quadrature q = Quadrature::Milstein);
ConversionResult backward_to_forward(const GridProcess& f, const OperatorFamily& l1,
                                     const OperatorFamily& l2, double eps,
                                     const BrownianPath& path, const SchemeConfig& cfg,
                                     Quadrature q = Quadrature::Milstein);

/// Debug export: index, s, then Re/Im of each entry (column-major).
void write_trajectory_csv(std::ostream& out, const PropagatorTrajectory& traj);

}  // namespace adiab
