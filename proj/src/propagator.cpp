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

#include "adiab/propagator.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "adiab/errors.hpp"
#include "adiab/report.hpp"

namespace adiab {

const char* to_string(Scheme scheme) {
  return scheme == Scheme::Exponential ? "exponential" : "euler_maruyama";
}

std::size_t required_steps(double eps, std::size_t steps_per_epsilon) {
  const double exact = static_cast<double>(steps_per_epsilon) / eps;
  auto m = static_cast<std::size_t>(std::ceil(exact - 1e-9 * exact));
  return std::max<std::size_t>(m, 1);
}

void check_grid_constraint(double eps, const BrownianPath& path, const SchemeConfig& cfg) {
  if (path.steps < required_steps(eps, cfg.steps_per_epsilon)) {
    throw GridTooCoarse("grid has " + std::to_string(path.steps) + " steps, K/eps requires " +
                        std::to_string(required_steps(eps, cfg.steps_per_epsilon)));
  }
}

// --- StepGenerator ---------------------------------------------------------

StepGenerator StepGenerator::sample(const OperatorFamily& l1, const OperatorFamily& l2, double eps,
                                    std::size_t steps) {
  if (l1.dim() != l2.dim()) throw GridMismatch("L1 and L2 dimensions differ");
  StepGenerator g;
  g.steps_ = steps;
  g.dim_ = l1.dim();
  g.eps_ = eps;
  g.l1_.reserve(steps + 1);
  g.l2_.reserve(steps + 1);
  g.drift_.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(steps);
    g.l1_.push_back(l1(s));
    g.l2_.push_back(l2(s));
    g.drift_.push_back(g.l1_.back() - 0.5 * g.l2_.back() * g.l2_.back());
  }
  return g;
}

StepGenerator StepGenerator::spectral(std::vector<Matrix> basis,
                                      std::vector<Eigen::VectorXd> energies,
                                      std::vector<Eigen::VectorXd> couplings, double eps) {
  if (basis.empty() || basis.size() != energies.size() || basis.size() != couplings.size()) {
    throw GridMismatch("spectral generator: inconsistent grid data");
  }
  StepGenerator g;
  g.steps_ = basis.size() - 1;
  g.dim_ = static_cast<std::size_t>(basis[0].rows());
  g.eps_ = eps;
  g.spectral_ = true;
  g.basis_ = std::move(basis);
  g.energies_ = std::move(energies);
  g.couplings_ = std::move(couplings);
  return g;
}

Matrix StepGenerator::l1(std::size_t i) const {
  if (!spectral_) return l1_[i];
  const Eigen::VectorXcd d =
      (cplx(0, -1) * energies_[i].cast<cplx>()).array() - 0.5 * couplings_[i].array().square();
  return basis_[i] * d.asDiagonal() * basis_[i].adjoint();
}

Matrix StepGenerator::l2(std::size_t i) const {
  if (!spectral_) return l2_[i];
  const Eigen::VectorXcd d = cplx(0, -1) * couplings_[i].cast<cplx>();
  return basis_[i] * d.asDiagonal() * basis_[i].adjoint();
}

namespace {

// Diagonal of the exponential step in the joint eigenbasis:
// exp(-i (E dt/eps + g dB/sqrt(eps))).
Eigen::VectorXcd unitary_phases(const Eigen::VectorXd& e, const Eigen::VectorXd& g, double dt,
                                double dB, double eps, double sign) {
  const double a = dt / eps, b = dB / std::sqrt(eps);
  Eigen::VectorXcd out(e.size());
  for (Eigen::Index k = 0; k < e.size(); ++k) out(k) = std::polar(1.0, -sign * (e(k) * a + g(k) * b));
  return out;
}

}  // namespace

Matrix StepGenerator::step(std::size_t i, double dB, Scheme scheme) const {
  const double h = dt();
  const double rs = 1.0 / std::sqrt(eps_);
  if (scheme == Scheme::Exponential) {
    if (spectral_) {
      return basis_[i] * unitary_phases(energies_[i], couplings_[i], h, dB, eps_, 1.0).asDiagonal() *
             basis_[i].adjoint();
    }
    return expm(drift_[i] * (h / eps_) + l2_[i] * (dB * rs));
  }
  const auto n = static_cast<Eigen::Index>(dim_);
  return Matrix::Identity(n, n) + l1(i) * (h / eps_) + l2(i) * (dB * rs);
}

Matrix StepGenerator::inverse_step(std::size_t i, double dB, Scheme scheme) const {
  const double h = dt();
  const double rs = 1.0 / std::sqrt(eps_);
  if (scheme == Scheme::Exponential) {
    if (spectral_) {
      return basis_[i] * unitary_phases(energies_[i], couplings_[i], h, dB, eps_, -1.0).asDiagonal() *
             basis_[i].adjoint();
    }
    return expm(-(drift_[i] * (h / eps_) + l2_[i] * (dB * rs)));
  }
  const auto n = static_cast<Eigen::Index>(dim_);
  const Matrix b = l2(i);
  return Matrix::Identity(n, n) + (b * b - l1(i)) * (h / eps_) - b * (dB * rs);
}

Matrix StepGenerator::deterministic_step(std::size_t i, Scheme scheme) const {
  const double h = dt();
  const auto n = static_cast<Eigen::Index>(dim_);
  if (scheme == Scheme::EulerMaruyama) return Matrix::Identity(n, n) + l1(i) * (h / eps_);
  if (spectral_) {
    Eigen::VectorXcd d(energies_[i].size());
    for (Eigen::Index k = 0; k < d.size(); ++k) {
      d(k) = std::exp(cplx(-0.5 * couplings_[i](k) * couplings_[i](k), -energies_[i](k)) * (h / eps_));
    }
    return basis_[i] * d.asDiagonal() * basis_[i].adjoint();
  }
  return expm(l1_[i] * (h / eps_));
}

Vector StepGenerator::apply(std::size_t i, double dB, Scheme scheme, const Vector& x) const {
  if (spectral_ && scheme == Scheme::Exponential) {
    const Eigen::VectorXcd phases = unitary_phases(energies_[i], couplings_[i], dt(), dB, eps_, 1.0);
    return basis_[i] * phases.cwiseProduct(basis_[i].adjoint() * x);
  }
  return step(i, dB, scheme) * x;
}

// --- propagation ------------------------------------------------------------

namespace {

void check_generator(const StepGenerator& gen, const BrownianPath& path) {
  if (gen.steps() != path.steps) {
    throw GridMismatch("generator sampled on " + std::to_string(gen.steps()) +
                       " steps, path has " + std::to_string(path.steps));
  }
}

Matrix identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return Matrix::Identity(n, n);
}

}  // namespace

PropagatorTrajectory propagate_forward(const StepGenerator& gen, const BrownianPath& path,
                                       const SchemeConfig& cfg, const PropagateOptions& opt) {
  check_generator(gen, path);
  check_grid_constraint(gen.eps(), path, cfg);
  PropagatorTrajectory t;
  t.eps = gen.eps();
  t.scheme = cfg.scheme;
  t.steps = path.steps;
  t.dt = path.dt;
  t.seed = path.seed;
  t.stream_id = path.stream_id;
  t.U.reserve(path.steps + 1);
  t.U.push_back(identity(gen.dim()));
  if (opt.keep_inverse) {
    t.inverse.reserve(path.steps + 1);
    t.inverse.push_back(identity(gen.dim()));
  }
  if (opt.keep_steps) t.step_matrices.reserve(path.steps);
  for (std::size_t i = 0; i < path.steps; ++i) {
    const double dB = path.increments[i];
    Matrix s = gen.step(i, dB, cfg.scheme);
    t.U.push_back(s * t.U.back());
    if (opt.keep_inverse) t.inverse.push_back(t.inverse.back() * gen.inverse_step(i, dB, cfg.scheme));
    if (opt.keep_steps) t.step_matrices.push_back(std::move(s));
  }
  return t;
}

PropagatorTrajectory propagate_forward(const OperatorFamily& l1, const OperatorFamily& l2,
                                       double eps, const BrownianPath& path,
                                       const SchemeConfig& cfg, const PropagateOptions& opt) {
  check_grid_constraint(eps, path, cfg);
  return propagate_forward(StepGenerator::sample(l1, l2, eps, path.steps), path, cfg, opt);
}

PropagatorTrajectory propagate_backward(const StepGenerator& gen, double s_fixed,
                                        const BrownianPath& path, const SchemeConfig& cfg) {
  check_generator(gen, path);
  check_grid_constraint(gen.eps(), path, cfg);
  if (s_fixed < 0.0 || s_fixed > 1.0) throw std::invalid_argument("s_fixed outside [0, 1]");
  const auto fixed = static_cast<std::size_t>(std::llround(s_fixed * static_cast<double>(path.steps)));
  PropagatorTrajectory t;
  t.eps = gen.eps();
  t.scheme = cfg.scheme;
  t.steps = path.steps;
  t.dt = path.dt;
  t.backward = true;
  t.s_fixed_index = fixed;
  t.seed = path.seed;
  t.stream_id = path.stream_id;
  t.U.assign(path.steps + 1, identity(gen.dim()));
  for (std::size_t i = fixed; i-- > 0;) {
    t.U[i] = t.U[i + 1] * gen.step(i + 1, path.increments[i], cfg.scheme);
  }
  return t;
}

PropagatorTrajectory propagate_backward(const OperatorFamily& l1, const OperatorFamily& l2,
                                        double eps, double s_fixed, const BrownianPath& path,
                                        const SchemeConfig& cfg) {
  check_grid_constraint(eps, path, cfg);
  return propagate_backward(StepGenerator::sample(l1, l2, eps, path.steps), s_fixed, path, cfg);
}

// --- audits -----------------------------------------------------------------

double semigroup_audit(const PropagatorTrajectory& traj, std::size_t split) {
  if (traj.backward) throw std::invalid_argument("semigroup_audit expects a forward trajectory");
  if (traj.step_matrices.size() != traj.steps) {
    throw std::invalid_argument("semigroup_audit needs stored step matrices");
  }
  if (split > traj.steps) throw std::out_of_range("split index beyond grid");
  const auto d = traj.U[0].rows();
  Matrix partial = Matrix::Identity(d, d);  // U(s_i, s')
  double worst = (traj.U[split] - partial * traj.U[split]).norm();
  for (std::size_t i = split; i < traj.steps; ++i) {
    partial = traj.step_matrices[i] * partial;
    worst = std::max(worst, operator_norm(traj.U[i + 1] - partial * traj.U[split]));
  }
  return worst;
}

double duhamel_audit(const StepGenerator& gen, const BrownianPath& path, const SchemeConfig& cfg) {
  check_generator(gen, path);
  check_grid_constraint(gen.eps(), path, cfg);
  const std::size_t m = path.steps;
  std::vector<Matrix> steps(m), v(m + 1);
  v[0] = identity(gen.dim());
  Matrix u = identity(gen.dim());
  for (std::size_t i = 0; i < m; ++i) {
    steps[i] = gen.step(i, path.increments[i], cfg.scheme);
    u = steps[i] * u;
    v[i + 1] = gen.deterministic_step(i, cfg.scheme) * v[i];
  }
  // Suffix products Q_j = U(1, s_j), accumulated from the right end.
  Matrix q = identity(gen.dim());
  Matrix integral = Matrix::Zero(u.rows(), u.cols());
  for (std::size_t j = m; j >= 1; --j) {
    integral += q * gen.l2(j) * v[j] * path.increments[j - 1];
    q = q * steps[j - 1];
  }
  return operator_norm(u - v[m] - integral / std::sqrt(gen.eps()));
}

double duhamel_audit(const OperatorFamily& l1, const OperatorFamily& l2, double eps,
                     const BrownianPath& path, const SchemeConfig& cfg) {
  check_grid_constraint(eps, path, cfg);
  return duhamel_audit(StepGenerator::sample(l1, l2, eps, path.steps), path, cfg);
}

ContractionAudit contraction_audit(const PropagatorTrajectory& traj, const StepGenerator& gen,
                                   const SchemeConfig& cfg) {
  if (gen.steps() != traj.steps) throw GridMismatch("generator and trajectory grids differ");
  for (std::size_t i = 0; i <= gen.steps(); ++i) {
    const Matrix l2 = gen.l2(i);
    const Matrix il2 = cplx(0, 1) * l2;
    if (!is_hermitian(il2, 1e-10)) {
      throw AssumptionAViolated("iL2 is not Hermitian at grid point " + std::to_string(i));
    }
    const double top = max_hermitian_part(gen.l1(i) - 0.5 * l2 * l2);
    if (top > 1e-10) {
      throw AssumptionAViolated("L1 - L2^2/2 is not dissipative at grid point " +
                                std::to_string(i) + " (max Re = " + std::to_string(top) + ")");
    }
  }
  ContractionAudit out;
  for (const auto& u : traj.U) out.max_norm = std::max(out.max_norm, operator_norm(u));
  out.threshold = 1.0 + cfg.tol_growth * traj.dt * static_cast<double>(traj.steps);
  out.violated = out.max_norm > out.threshold;
  return out;
}

std::vector<Vector> backward_propagated_integral(const PropagatorTrajectory& traj,
                                                 const StepGenerator& gen,
                                                 const std::vector<Vector>& f,
                                                 const BrownianPath& path, Quadrature q) {
  if (traj.backward || traj.step_matrices.size() != traj.steps) {
    throw std::invalid_argument("backward_propagated_integral needs a forward trajectory with steps");
  }
  if (f.size() != traj.steps + 1 || path.steps != traj.steps || gen.steps() != traj.steps) {
    throw GridMismatch("integrand, path and trajectory grids differ");
  }
  const double rs = 1.0 / std::sqrt(gen.eps());
  std::vector<Vector> j(traj.steps + 1);
  j[0] = Vector::Zero(f[0].size());
  for (std::size_t i = 0; i < traj.steps; ++i) {
    const double dB = path.increments[i];
    Vector term = f[i + 1] * dB;
    if (q == Quadrature::Milstein) {
      // Noise-noise term, and the drift-noise term replaced by its mean
      // given dB: E[int (s_{i+1} - s') dB | dB] = dB dt / 2.
      const Vector lf = gen.l1(i) * f[i + 1];
      term += gen.l2(i) * f[i + 1] * (rs * 0.5 * (dB * dB - path.dt)) +
              lf * (0.5 * path.dt * dB / gen.eps());
    }
    j[i + 1] = traj.step_matrices[i] * j[i] + term;
  }
  return j;
}

ConversionResult backward_to_forward(const GridProcess& f, const StepGenerator& gen,
                                     const BrownianPath& path, const SchemeConfig& cfg,
                                     Quadrature q) {
  if (f.adaptation != Adaptation::Deterministic) {
    throw AdaptationMismatch("backward_to_forward needs a deterministic integrand");
  }
  check_generator(gen, path);
  if (f.values.size() != path.steps + 1) throw GridMismatch("integrand grid differs from path");
  const std::size_t m = path.steps;
  const double rs = 1.0 / std::sqrt(gen.eps());

  // f~ = [1 + L2 (L1 - L2^2)^{-1} L2] f on every grid point.
  std::vector<Vector> ftilde(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    const Matrix l1 = gen.l1(i), l2 = gen.l2(i);
    const Vector rhs = l2 * f.values[i];
    const Matrix res = l1 - l2 * l2;
    const Vector w = res.completeOrthogonalDecomposition().solve(rhs);
    const double err = (res * w - rhs).norm();
    if (!w.allFinite() || err > 1e-8 * std::max(1.0, rhs.norm())) {
      throw SingularConversion("L1 - L2^2 not invertible on ran L2 at grid point " +
                               std::to_string(i));
    }
    ftilde[i] = f.values[i] + l2 * w;
  }

  PropagateOptions opt;
  opt.keep_inverse = true;
  const PropagatorTrajectory traj = propagate_forward(gen, path, cfg, opt);

  std::vector<Vector> fv(m + 1);
  for (std::size_t i = 0; i <= m; ++i) fv[i] = f.values[i];
  const std::vector<Vector> back = backward_propagated_integral(traj, gen, fv, path, q);

  Vector fwd = Vector::Zero(fv[0].size());
  for (std::size_t i = 0; i < m; ++i) {
    const double dB = path.increments[i];
    Vector term = ftilde[i] * dB;
    if (q == Quadrature::Milstein) {
      const Matrix l2 = gen.l2(i);
      term -= l2 * ftilde[i] * (rs * 0.5 * (dB * dB - path.dt)) +
              (gen.l1(i) - l2 * l2) * ftilde[i] * (0.5 * path.dt * dB / gen.eps());
    }
    fwd += traj.inverse[i] * term;
  }
  ConversionResult out;
  out.backward_value = back[m];
  out.forward_value = traj.U[m] * fwd;
  out.discrepancy = (out.backward_value - out.forward_value).norm();
  return out;
}

ConversionResult backward_to_forward(const GridProcess& f, const OperatorFamily& l1,
                                     const OperatorFamily& l2, double eps,
                                     const BrownianPath& path, const SchemeConfig& cfg,
                                     Quadrature q) {
  return backward_to_forward(f, StepGenerator::sample(l1, l2, eps, path.steps), path, cfg, q);
}

void write_trajectory_csv(std::ostream& out, const PropagatorTrajectory& traj) {
  using report::format_double;
  if (traj.U.empty()) return;
  const auto rows = traj.U[0].rows(), cols = traj.U[0].cols();
  std::vector<std::string> header{"index", "s"};
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const std::string tag = "U" + std::to_string(r) + std::to_string(c);
      header.push_back(tag + "_re");
      header.push_back(tag + "_im");
    }
  }
  out << report::csv_line(header);
  for (std::size_t i = 0; i < traj.U.size(); ++i) {
    std::vector<std::string> cells{std::to_string(i), format_double(static_cast<double>(i) * traj.dt)};
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        cells.push_back(format_double(traj.U[i](r, c).real()));
        cells.push_back(format_double(traj.U[i](r, c).imag()));
      }
    }
    out << report::csv_line(cells);
  }
}

}  // namespace adiab
