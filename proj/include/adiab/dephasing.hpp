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

#include <Eigen/Dense>

#include "adiab/brownian.hpp"
#include "adiab/linalg.hpp"
#include "adiab/propagator.hpp"

namespace adiab {

/// Commuting Hermitian families H(s) and G(s) (G has eigenvalues sqrt(gamma_k)).
/// The stochastic Schroedinger equation uses L1 = -(iH + G^2/2), L2 = -iG.
struct DephasingModel {
  std::string name;
  OperatorFamily H;
  OperatorFamily G;
  /// Level whose eigenvalue data play the role of the ground state.
  std::size_t reference = 0;
  double commutation_tol = 1e-8;
  /// Eigenvalue data already subtracted by gauge_subtract. Levels are labelled
  /// by sorting the unshifted joint spectrum at s = 0.
  std::function<double(double)> energy_shift;
  std::function<double(double)> coupling_shift;

  std::size_t dim() const { return H.dim(); }
  OperatorFamily l1() const;
  OperatorFamily l2() const;

  /// d = 2: psi_0 = (cos t, sin t), t = rate * s, level 1 with (E, gamma).
  static DephasingModel rotating_dephasing(double energy = 1.0, double gamma = 1.0,
                                           double rate = 0.7853981633974483);
  /// d = 3: frame R01(a s) R02(b s), levels (0, 0), (e1, g1), (e2, g2) with g
  /// the rates gamma_k.
  static DephasingModel three_level(double a = 0.7853981633974483,
                                    double b = 0.5235987755982988, double e1 = 1.0,
                                    double g1 = 1.0, double e2 = 2.5, double g2 = 0.6);
  /// Matrices on the uniform knots j / (n - 1), interpolated entrywise by
  /// cubic B-splines.
  static DephasingModel table(const std::vector<Matrix>& h, const std::vector<Matrix>& g,
                              double commutation_tol = 1e-6);
};

struct SpectralFrame {
  std::size_t steps = 0;
  std::size_t dim = 0;
  std::size_t reference = 0;
  /// Column k of psi[i] is the gauge-fixed psi_k(s_i).
  std::vector<Matrix> psi;
  std::vector<Matrix> psi_dot;
  std::vector<Eigen::VectorXd> energies;
  std::vector<Eigen::VectorXd> couplings;

  /// E_k - E_ref and g_k - g_ref at s_i.
  double relative_energy(std::size_t i, std::size_t k) const;
  double relative_coupling(std::size_t i, std::size_t k) const;
};

SpectralFrame build_frame(const DephasingModel& model, std::size_t steps,
                          double gap_tol = kDefaultGapTol);

/// H -> H - E_k, G -> G - g_k; level k becomes the reference level.
DephasingModel gauge_subtract(const DephasingModel& model, std::size_t level,
                              std::size_t spline_steps = 1024, double gap_tol = kDefaultGapTol);

StepGenerator spectral_generator(const SpectralFrame& frame, double eps);

struct PsiTrajectory {
  std::vector<Vector> psi;
  double max_norm_deviation = 0.0;
};

/// Starts from psi_ref(0) unless psi0 is given.
PsiTrajectory simulate_psi(const SpectralFrame& frame, double eps, const BrownianPath& path,
                           const SchemeConfig& cfg, const std::optional<Vector>& psi0 = {});
PsiTrajectory simulate_psi(const DephasingModel& model, double eps, const BrownianPath& path,
                           const SchemeConfig& cfg, const std::optional<Vector>& psi0 = {});

struct TransitionCoefficients {
  /// t[i](k), r[i](k); the reference entry is zero.
  std::vector<Eigen::VectorXcd> t;
  std::vector<Eigen::VectorXcd> r;
};

TransitionCoefficients transition_coefficients(const SpectralFrame& frame,
                                               double gap_tol = kDefaultGapTol);

/// D^(k)(s_to, s_from) with relative level data, s_to >= s_from.
cplx dynamical_phase(const SpectralFrame& frame, std::size_t level, double eps,
                     const BrownianPath& path, std::size_t to, std::size_t from);

struct TunnelingSample {
  std::uint64_t path_id = 0;
  double eps = 0.0;
  /// Indexed by level; reference entries are zero.
  std::vector<double> T_sim;
  /// eps |A_k|^2, directly comparable with T_sim.
  std::vector<double> T_pred;
  std::vector<cplx> A;
  double T_total = 0.0;
  double max_norm_deviation = 0.0;
  double completeness_error = 0.0;
  /// |psi(1) - D_ref (psi_ref(1) + sqrt(eps) sum_k A_k psi_k(1))|.
  double first_order_residual = 0.0;
};

TunnelingSample tunneling_sample(const SpectralFrame& frame, const TransitionCoefficients& coeffs,
                                 double eps, const BrownianPath& path, const SchemeConfig& cfg);

/// |int_0^1 D^(k)(0, s) r_k(s) dB_s|^2 per level, forward sums.
std::vector<double> forward_tunneling_form(const SpectralFrame& frame,
                                           const TransitionCoefficients& coeffs, double eps,
                                           const BrownianPath& path);

struct TunnelingOptions {
  double eps = 0.05;
  std::size_t paths = 4000;
  std::uint64_t seed = 1;
  std::uint64_t stream_offset = 0;
  std::size_t workers = 1;
  SchemeConfig scheme;
  bool forward_form = false;
  double gap_tol = kDefaultGapTol;
};

struct TunnelingEnsemble {
  double eps = 0.0;
  std::size_t steps = 0;
  std::size_t reference = 0;
  std::vector<TunnelingSample> samples;
  /// forward[p][k] when requested.
  std::vector<std::vector<double>> forward;
  double max_norm_deviation = 0.0;
  double max_completeness_error = 0.0;

  /// T_sim of one level over all paths, divided by eps when scaled.
  std::vector<double> level(std::size_t k, bool scaled = true) const;
};

TunnelingEnsemble tunneling_ensemble(const DephasingModel& model, const TunnelingOptions& opt);

/// Columns: path_id, epsilon, k, T_sim, T_pred, A_k_re, A_k_im.
void write_samples_csv(std::ostream& out, const TunnelingEnsemble& ens);

}  // namespace adiab
