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

#include "adiab/dephasing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "adiab/errors.hpp"
#include "adiab/grid.hpp"
#include "adiab/parallel.hpp"
#include "adiab/report.hpp"

namespace adiab {

namespace {

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

Eigen::Matrix2d rot2(double t) {
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

// Rotation by t in the (i, j) coordinate plane of R^3.
Eigen::Matrix3d rot3(int i, int j, double t) {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  r(i, i) = std::cos(t);
  r(j, j) = std::cos(t);
  r(i, j) = -std::sin(t);
  r(j, i) = std::sin(t);
  return r;
}

double value_or_zero(const std::function<double(double)>& f, double s) { return f ? f(s) : 0.0; }

}  // namespace

OperatorFamily DephasingModel::l1() const {
  const OperatorFamily h = H, g = G;
  return OperatorFamily(dim(), [h, g](double s) {
    const Matrix gs = g(s);
    return Matrix(cplx(0, -1) * h(s) - 0.5 * gs * gs);
  });
}

OperatorFamily DephasingModel::l2() const {
  const OperatorFamily g = G;
  return OperatorFamily(dim(), [g](double s) { return Matrix(cplx(0, -1) * g(s)); });
}

DephasingModel DephasingModel::rotating_dephasing(double energy, double gamma, double rate) {
  auto make = [rate](double level) {
    return OperatorFamily(2, [rate, level](double s) {
      const Eigen::Matrix2d r = rot2(rate * s);
      const Eigen::Matrix2d d = Eigen::Vector2d(0.0, level).asDiagonal();
      return Matrix((r * d * r.transpose()).cast<cplx>());
    });
  };
  DephasingModel m;
  m.name = "rotating_dephasing";
  m.H = make(energy);
  m.G = make(std::sqrt(gamma));
  return m;
}

DephasingModel DephasingModel::three_level(double a, double b, double e1, double g1, double e2,
                                           double g2) {
  auto make = [a, b](Eigen::Vector3d levels) {
    return OperatorFamily(3, [a, b, levels](double s) {
      const Eigen::Matrix3d r = rot3(0, 1, a * s) * rot3(0, 2, b * s);
      return Matrix((r * levels.asDiagonal() * r.transpose()).cast<cplx>());
    });
  };
  DephasingModel m;
  m.name = "three_level";
  m.H = make(Eigen::Vector3d(0.0, e1, e2));
  m.G = make(Eigen::Vector3d(0.0, std::sqrt(g1), std::sqrt(g2)));
  return m;
}

DephasingModel DephasingModel::table(const std::vector<Matrix>& h, const std::vector<Matrix>& g,
                                     double commutation_tol) {
  if (h.size() != g.size() || h.size() < 5) {
    throw ConfigInvalid("table model needs matching H and G tables with >= 5 knots");
  }
  const auto d = h[0].rows();
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j].rows() != d || h[j].cols() != d || g[j].rows() != d || g[j].cols() != d) {
      throw ConfigInvalid("table model: knot " + std::to_string(j) + " has wrong shape");
    }
  }
  const double step = 1.0 / static_cast<double>(h.size() - 1);
  auto make = [&](const std::vector<Matrix>& knots) {
    std::vector<Spline> splines;
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = 0; r < d; ++r) {
        std::vector<double> re, im;
        for (const auto& k : knots) {
          re.push_back(k(r, c).real());
          im.push_back(k(r, c).imag());
        }
        splines.emplace_back(re.begin(), re.end(), 0.0, step);
        splines.emplace_back(im.begin(), im.end(), 0.0, step);
      }
    }
    return OperatorFamily(static_cast<std::size_t>(d), [splines, d](double s) {
      Matrix out(d, d);
      std::size_t n = 0;
      for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < d; ++r, n += 2) out(r, c) = cplx(splines[n](s), splines[n + 1](s));
      }
      return out;
    });
  };
  DephasingModel m;
  m.name = "table";
  m.H = make(h);
  m.G = make(g);
  m.commutation_tol = commutation_tol;
  return m;
}

// --- frame ------------------------------------------------------------------

double SpectralFrame::relative_energy(std::size_t i, std::size_t k) const {
  return energies[i](static_cast<Eigen::Index>(k)) -
         energies[i](static_cast<Eigen::Index>(reference));
}

double SpectralFrame::relative_coupling(std::size_t i, std::size_t k) const {
  return couplings[i](static_cast<Eigen::Index>(k)) -
         couplings[i](static_cast<Eigen::Index>(reference));
}

namespace {

struct JointEigen {
  Matrix vectors;
  Eigen::VectorXd energies;
  Eigen::VectorXd couplings;
};

JointEigen joint_diagonalize(const Matrix& h, const Matrix& g, double s, double comm_tol,
                             double gap_tol) {
  if (!is_hermitian(h, 1e-10) || !is_hermitian(g, 1e-10)) {
    throw NotHermitian("H or G not Hermitian at s = " + std::to_string(s));
  }
  const double scale = std::max(1.0, h.norm() * g.norm());
  if ((h * g - g * h).norm() > comm_tol * scale) {
    throw NotCommuting("[H, G] = " + std::to_string((h * g - g * h).norm()) + " at s = " +
                       std::to_string(s));
  }
  const HermitianDecomposition hd = hermitian_decompose(h);
  const auto d = h.rows();
  JointEigen out;
  out.vectors = hd.eigenvectors;
  out.energies = hd.eigenvalues;
  out.couplings.resize(d);

  // Resolve G inside clusters of (numerically) degenerate energies.
  const double cluster_tol = 1e-8 * std::max(1.0, h.norm());
  for (Eigen::Index start = 0; start < d;) {
    Eigen::Index end = start + 1;
    while (end < d && hd.eigenvalues(end) - hd.eigenvalues(end - 1) <= cluster_tol) ++end;
    const Matrix v = hd.eigenvectors.middleCols(start, end - start);
    const HermitianDecomposition gd = hermitian_decompose(v.adjoint() * g * v);
    out.vectors.middleCols(start, end - start) = v * gd.eigenvectors;
    start = end;
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    const Vector v = out.vectors.col(k);
    out.energies(k) = (v.adjoint() * h * v)(0).real();
    out.couplings(k) = (v.adjoint() * g * v)(0).real();
    if ((g * v - out.couplings(k) * v).norm() > std::sqrt(comm_tol) * std::max(1.0, g.norm())) {
      throw NotCommuting("no joint eigenbasis at s = " + std::to_string(s));
    }
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index l = k + 1; l < d; ++l) {
      const double sep = std::max(std::abs(out.energies(k) - out.energies(l)),
                                  std::abs(out.couplings(k) - out.couplings(l)));
      if (sep <= gap_tol) {
        throw SpectrumCollision("levels " + std::to_string(k) + " and " + std::to_string(l) +
                                " collide at s = " + std::to_string(s));
      }
    }
  }
  return out;
}

}  // namespace

SpectralFrame build_frame(const DephasingModel& model, std::size_t steps, double gap_tol) {
  if (steps < 2) throw std::invalid_argument("build_frame needs at least two steps");
  const std::size_t m = steps;
  const auto d = static_cast<Eigen::Index>(model.dim());
  if (model.reference >= model.dim()) throw std::out_of_range("reference level out of range");

  SpectralFrame f;
  f.steps = m;
  f.dim = model.dim();
  f.reference = model.reference;
  f.psi.resize(m + 1);
  f.energies.resize(m + 1);
  f.couplings.resize(m + 1);

  for (std::size_t i = 0; i <= m; ++i) {
    const double s = grid::point(i, m);
    JointEigen je = joint_diagonalize(model.H(s), model.G(s), s, model.commutation_tol, gap_tol);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    if (i == 0) {
      const double e0 = value_or_zero(model.energy_shift, s);
      const double g0 = value_or_zero(model.coupling_shift, s);
      std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        const double ex = je.energies(x) + e0, ey = je.energies(y) + e0;
        if (ex != ey) return ex < ey;
        return je.couplings(x) + g0 < je.couplings(y) + g0;
      });
    } else {
      // Greedy maximal-overlap matching against the previous grid point.
      const Eigen::MatrixXd overlap = (f.psi[i - 1].adjoint() * je.vectors).cwiseAbs();
      std::vector<bool> used_prev(order.size(), false), used_new(order.size(), false);
      for (std::size_t n = 0; n < order.size(); ++n) {
        double best = -1.0;
        Eigen::Index bp = 0, bn = 0;
        for (Eigen::Index p = 0; p < d; ++p) {
          if (used_prev[static_cast<std::size_t>(p)]) continue;
          for (Eigen::Index q = 0; q < d; ++q) {
            if (!used_new[static_cast<std::size_t>(q)] && overlap(p, q) > best) {
              best = overlap(p, q);
              bp = p;
              bn = q;
            }
          }
        }
        used_prev[static_cast<std::size_t>(bp)] = true;
        used_new[static_cast<std::size_t>(bn)] = true;
        order[static_cast<std::size_t>(bp)] = bn;
      }
    }
    Matrix psi(d, d);
    Eigen::VectorXd e(d), g(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      const Eigen::Index src = order[static_cast<std::size_t>(k)];
      Vector v = je.vectors.col(src).normalized();
      if (i == 0) {
        Eigen::Index big = 0;
        v.cwiseAbs().maxCoeff(&big);
        v *= std::conj(v(big)) / std::abs(v(big));
      } else {
        const cplx ov = f.psi[i - 1].col(k).dot(v);
        if (std::abs(ov) > 0.0) v *= std::conj(ov) / std::abs(ov);
      }
      psi.col(k) = v;
      e(k) = je.energies(src);
      g(k) = je.couplings(src);
    }
    f.psi[i] = std::move(psi);
    f.energies[i] = e;
    f.couplings[i] = g;
  }
  f.psi_dot = grid::derivative(f.psi, grid::step(m));
  return f;
}

DephasingModel gauge_subtract(const DephasingModel& model, std::size_t level,
                              std::size_t spline_steps, double gap_tol) {
  if (level >= model.dim()) throw std::out_of_range("gauge_subtract: level out of range");
  const SpectralFrame f = build_frame(model, spline_steps, gap_tol);
  auto fit = [&](bool energy) -> std::function<double(double)> {
    std::vector<double> v(spline_steps + 1);
    for (std::size_t i = 0; i <= spline_steps; ++i) {
      const auto k = static_cast<Eigen::Index>(level);
      v[i] = energy ? f.energies[i](k) : f.couplings[i](k);
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi - *lo <= 1e-13 * std::max(1.0, std::abs(*lo))) {
      const double c = v[0];
      return [c](double) { return c; };
    }
    Spline sp(v.begin(), v.end(), 0.0, grid::step(spline_steps));
    return [sp](double s) { return sp(s); };
  };
  const auto e = fit(true), g = fit(false);
  const auto d = static_cast<Eigen::Index>(model.dim());

  DephasingModel out = model;
  out.reference = level;
  const OperatorFamily h = model.H, gm = model.G;
  out.H = OperatorFamily(model.dim(), [h, e, d](double s) {
    return Matrix(h(s) - e(s) * Matrix::Identity(d, d));
  });
  out.G = OperatorFamily(model.dim(), [gm, g, d](double s) {
    return Matrix(gm(s) - g(s) * Matrix::Identity(d, d));
  });
  const auto e_old = model.energy_shift, g_old = model.coupling_shift;
  out.energy_shift = [e_old, e](double s) { return value_or_zero(e_old, s) + e(s); };
  out.coupling_shift = [g_old, g](double s) { return value_or_zero(g_old, s) + g(s); };
  return out;
}

StepGenerator spectral_generator(const SpectralFrame& frame, double eps) {
  return StepGenerator::spectral(frame.psi, frame.energies, frame.couplings, eps);
}

// --- simulation -------------------------------------------------------------

PsiTrajectory simulate_psi(const SpectralFrame& frame, double eps, const BrownianPath& path,
                           const SchemeConfig& cfg, const std::optional<Vector>& psi0) {
  if (frame.steps != path.steps) throw GridMismatch("frame and path grids differ");
  check_grid_constraint(eps, path, cfg);
  const StepGenerator gen = spectral_generator(frame, eps);
  PsiTrajectory out;
  out.psi.reserve(path.steps + 1);
  out.psi.push_back(psi0 ? *psi0 : Vector(frame.psi[0].col(static_cast<Eigen::Index>(frame.reference))));
  const double n0 = out.psi[0].norm();
  for (std::size_t i = 0; i < path.steps; ++i) {
    out.psi.push_back(gen.apply(i, path.increments[i], cfg.scheme, out.psi.back()));
    out.max_norm_deviation = std::max(out.max_norm_deviation, std::abs(out.psi.back().norm() - n0));
  }
  return out;
}

PsiTrajectory simulate_psi(const DephasingModel& model, double eps, const BrownianPath& path,
                           const SchemeConfig& cfg, const std::optional<Vector>& psi0) {
  return simulate_psi(build_frame(model, path.steps), eps, path, cfg, psi0);
}

TransitionCoefficients transition_coefficients(const SpectralFrame& frame, double gap_tol) {
  const auto d = static_cast<Eigen::Index>(frame.dim);
  const auto ref = static_cast<Eigen::Index>(frame.reference);
  TransitionCoefficients c;
  c.t.assign(frame.steps + 1, Eigen::VectorXcd::Zero(d));
  c.r.assign(frame.steps + 1, Eigen::VectorXcd::Zero(d));
  for (std::size_t i = 0; i <= frame.steps; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      if (k == ref) continue;
      const double e = frame.relative_energy(i, static_cast<std::size_t>(k));
      const double g = frame.relative_coupling(i, static_cast<std::size_t>(k));
      const cplx den_t(-0.5 * g * g, -e), den_r(0.5 * g * g, -e);
      if (std::abs(den_t) <= gap_tol) {
        throw GapViolation("level " + std::to_string(k) + " has vanishing L1 eigenvalue at s = " +
                           std::to_string(grid::point(i, frame.steps)));
      }
      const cplx num = cplx(0, -g) * frame.psi[i].col(k).dot(frame.psi_dot[i].col(ref));
      c.t[i](k) = num / den_t;
      c.r[i](k) = num / den_r;
    }
  }
  return c;
}

cplx dynamical_phase(const SpectralFrame& frame, std::size_t level, double eps,
                     const BrownianPath& path, std::size_t to, std::size_t from) {
  if (frame.steps != path.steps) throw GridMismatch("frame and path grids differ");
  if (to < from || to > frame.steps) throw std::out_of_range("dynamical_phase: need from <= to <= M");
  if (to == from) return 1.0;
  std::vector<double> e(to - from + 1);
  for (std::size_t i = from; i <= to; ++i) e[i - from] = frame.relative_energy(i, level);
  const double ie = grid::cumulative_simpson(e, path.dt).back();
  double ig = 0.0;
  for (std::size_t i = from; i < to; ++i) ig += frame.relative_coupling(i, level) * path.increments[i];
  return std::polar(1.0, -ie / eps - ig / std::sqrt(eps));
}

namespace {

// Scalar level-k step phase exp(-i (e dt/eps + g dB/sqrt(eps))).
cplx level_step(double e, double g, double dt, double dB, double eps) {
  return std::polar(1.0, -(e * dt / eps + g * dB / std::sqrt(eps)));
}

}  // namespace

TunnelingSample tunneling_sample(const SpectralFrame& frame, const TransitionCoefficients& coeffs,
                                 double eps, const BrownianPath& path, const SchemeConfig& cfg) {
  const PsiTrajectory sim = simulate_psi(frame, eps, path, cfg);
  const std::size_t m = path.steps;
  const auto d = static_cast<Eigen::Index>(frame.dim);
  const auto ref = static_cast<Eigen::Index>(frame.reference);
  const double rs = 1.0 / std::sqrt(eps);

  TunnelingSample out;
  out.path_id = path.stream_id;
  out.eps = eps;
  out.T_sim.assign(frame.dim, 0.0);
  out.T_pred.assign(frame.dim, 0.0);
  out.A.assign(frame.dim, 0.0);
  out.max_norm_deviation = sim.max_norm_deviation;

  for (std::size_t i = 0; i <= m; ++i) {
    const Vector amp = frame.psi[i].adjoint() * sim.psi[i];
    out.completeness_error =
        std::max(out.completeness_error, std::abs(amp.squaredNorm() - sim.psi[i].squaredNorm()));
  }
  const Vector amp = frame.psi[m].adjoint() * sim.psi[m];
  for (Eigen::Index k = 0; k < d; ++k) {
    if (k != ref) out.T_sim[static_cast<std::size_t>(k)] = std::norm(amp(k));
  }
  out.T_total = 1.0 - std::norm(amp(ref));

  // Backward integral J_{i+1} = S_i J_i + t(s_{i+1}) dB_i + Milstein term.
  cplx d_ref = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    d_ref *= level_step(frame.energies[i](ref), frame.couplings[i](ref), path.dt,
                        path.increments[i], eps);
  }
  Vector first = frame.psi[m].col(ref);
  for (Eigen::Index k = 0; k < d; ++k) {
    if (k == ref) continue;
    const auto kk = static_cast<std::size_t>(k);
    cplx j = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double dB = path.increments[i];
      const double e = frame.relative_energy(i, kk), g = frame.relative_coupling(i, kk);
      const cplx f = coeffs.t[i + 1](k);
      j = level_step(e, g, path.dt, dB, eps) * j + f * dB +
          cplx(0, -g * rs) * f * (0.5 * (dB * dB - path.dt)) +
          cplx(-0.5 * g * g, -e) * f * (0.5 * path.dt * dB / eps);
    }
    out.A[kk] = j;
    out.T_pred[kk] = eps * std::norm(j);
    first += std::sqrt(eps) * j * frame.psi[m].col(k);
  }
  out.first_order_residual = (sim.psi[m] - d_ref * first).norm();
  return out;
}

std::vector<double> forward_tunneling_form(const SpectralFrame& frame,
                                           const TransitionCoefficients& coeffs, double eps,
                                           const BrownianPath& path) {
  if (frame.steps != path.steps) throw GridMismatch("frame and path grids differ");
  const auto d = static_cast<Eigen::Index>(frame.dim);
  const auto ref = static_cast<Eigen::Index>(frame.reference);
  const double rs = 1.0 / std::sqrt(eps);
  std::vector<double> out(frame.dim, 0.0);
  for (Eigen::Index k = 0; k < d; ++k) {
    if (k == ref) continue;
    const auto kk = static_cast<std::size_t>(k);
    cplx inv = 1.0;  // D(0, s_i)
    cplx acc = 0.0;
    for (std::size_t i = 0; i < path.steps; ++i) {
      const double dB = path.increments[i];
      const double e = frame.relative_energy(i, kk), g = frame.relative_coupling(i, kk);
      const cplx f = coeffs.r[i](k);
      acc += inv * (f * dB - cplx(0, -g * rs) * f * (0.5 * (dB * dB - path.dt)) -
                    cplx(0.5 * g * g, -e) * f * (0.5 * path.dt * dB / eps));
      inv *= std::conj(level_step(e, g, path.dt, dB, eps));
    }
    out[kk] = std::norm(acc);
  }
  return out;
}

// --- ensembles --------------------------------------------------------------

std::vector<double> TunnelingEnsemble::level(std::size_t k, bool scaled) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(scaled ? s.T_sim[k] / eps : s.T_sim[k]);
  return out;
}

TunnelingEnsemble tunneling_ensemble(const DephasingModel& model, const TunnelingOptions& opt) {
  const std::size_t m = required_steps(opt.eps, opt.scheme.steps_per_epsilon);
  const SpectralFrame frame = build_frame(model, m, opt.gap_tol);
  const TransitionCoefficients coeffs = transition_coefficients(frame, opt.gap_tol);

  TunnelingEnsemble ens;
  ens.eps = opt.eps;
  ens.steps = m;
  ens.reference = model.reference;
  ens.samples.resize(opt.paths);
  if (opt.forward_form) ens.forward.resize(opt.paths);
  parallel_for(opt.paths, opt.workers, [&](std::size_t p) {
    const BrownianPath path = sample_path(m, opt.seed, opt.stream_offset + p);
    ens.samples[p] = tunneling_sample(frame, coeffs, opt.eps, path, opt.scheme);
    ens.samples[p].path_id = p;
    if (opt.forward_form) ens.forward[p] = forward_tunneling_form(frame, coeffs, opt.eps, path);
  });
  for (const auto& s : ens.samples) {
    ens.max_norm_deviation = std::max(ens.max_norm_deviation, s.max_norm_deviation);
    ens.max_completeness_error = std::max(ens.max_completeness_error, s.completeness_error);
  }
  return ens;
}

void write_samples_csv(std::ostream& out, const TunnelingEnsemble& ens) {
  using report::format_double;
  out << report::csv_line({"path_id", "epsilon", "k", "T_sim", "T_pred", "A_k_re", "A_k_im"});
  for (const auto& s : ens.samples) {
    for (std::size_t k = 0; k < s.T_sim.size(); ++k) {
      if (k == ens.reference) continue;
      out << report::csv_line({std::to_string(s.path_id), format_double(s.eps), std::to_string(k),
                               format_double(s.T_sim[k]), format_double(s.T_pred[k]),
                               format_double(s.A[k].real()), format_double(s.A[k].imag())});
    }
  }
}

}  // namespace adiab
