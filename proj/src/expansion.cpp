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

#include "adiab/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "adiab/errors.hpp"
#include "adiab/grid.hpp"
#include "adiab/parallel.hpp"
#include "adiab/report.hpp"

namespace adiab {

namespace {

constexpr double kRangeTol = 1e-6;

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

void check_projection(const Matrix& p, double s, double tol) {
  const double err = (p * p - p).norm();
  if (!(err <= tol * std::max(1.0, p.norm()))) {
    throw NotAProjection("P^2 != P at s = " + std::to_string(s) + " (defect " +
                         std::to_string(err) + ")");
  }
}

}  // namespace

TransportTrajectory parallel_transport(const OperatorFamily& p_family, std::size_t steps,
                                       double projection_tol) {
  if (steps == 0) throw std::invalid_argument("parallel_transport needs at least one step");
  const auto d = static_cast<Eigen::Index>(p_family.dim());
  const double h = grid::step(steps);
  auto gen_at = [&](double s) {
    return commutator(p_family.derivative(s), p_family(s));
  };

  TransportTrajectory out;
  out.steps = steps;
  out.T.reserve(steps + 1);
  out.P.reserve(steps + 1);
  out.generator.reserve(steps + 1);
  out.T.push_back(Matrix::Identity(d, d));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double s = grid::point(i, steps);
    out.P.push_back(p_family(s));
    check_projection(out.P.back(), s, projection_tol);
    out.generator.push_back(gen_at(s));
  }
  for (std::size_t i = 0; i < steps; ++i) {
    const double s = grid::point(i, steps);
    const Matrix& t = out.T.back();
    const Matrix mid = gen_at(s + 0.5 * h);
    const Matrix k1 = out.generator[i] * t;
    const Matrix k2 = mid * (t + 0.5 * h * k1);
    const Matrix k3 = mid * (t + 0.5 * h * k2);
    const Matrix k4 = out.generator[i + 1] * (t + h * k3);
    out.T.push_back(t + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  for (std::size_t i = 0; i <= steps; ++i) {
    out.intertwining_error = std::max(
        out.intertwining_error, operator_norm(out.T[i] * out.P[0] - out.P[i] * out.T[i]));
  }
  return out;
}

OperatorFamily kernel_projection_family(const OperatorFamily& l1, double gap_tol) {
  return OperatorFamily(l1.dim(), [l1, gap_tol](double s) {
    return kernel_projection(l1(s), gap_tol);
  });
}

Vector ExpansionCoefficients::slow_manifold_initial(double eps) const {
  Vector x = Vector::Zero(a[0][0].size());
  double w = 1.0;
  for (std::size_t n = 0; n <= order; ++n) {
    x += w * (a[n][0] + b[n][0]);
    w *= eps;
  }
  return x;
}

ExpansionCoefficients expansion_coefficients(const OperatorFamily& l1,
                                             const std::vector<Vector>& a_init, std::size_t order,
                                             std::size_t steps, double gap_tol) {
  if (order > kMaxExpansionOrder) {
    throw UnsupportedOrder("expansion order " + std::to_string(order) + " exceeds " +
                           std::to_string(kMaxExpansionOrder));
  }
  if (a_init.size() > order + 1) throw UnsupportedOrder("more initial data than orders");
  if (a_init.empty()) throw InitialDataNotInKernel("a_0(0) is required");
  const std::size_t m = steps;
  const double h = grid::step(m);
  const auto d = static_cast<Eigen::Index>(l1.dim());

  ExpansionCoefficients c;
  c.order = order;
  c.steps = m;
  const OperatorFamily pfam = kernel_projection_family(l1, gap_tol);
  c.transport = parallel_transport(pfam, m);
  c.P = c.transport.P;

  std::vector<Matrix> l1s(m + 1), tinv(m + 1), pdot(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    l1s[i] = l1(grid::point(i, m));
    pdot[i] = pfam.derivative(grid::point(i, m));
    tinv[i] = c.transport.T[i].inverse();
  }

  for (std::size_t n = 0; n < a_init.size(); ++n) {
    if (a_init[n].size() != d) throw GridMismatch("initial data has wrong dimension");
    const double defect = (c.P[0] * a_init[n] - a_init[n]).norm();
    if (defect > 1e-8 * std::max(1.0, a_init[n].norm())) {
      throw InitialDataNotInKernel("a_" + std::to_string(n) + "(0) not in ker L1(0), defect " +
                                   std::to_string(defect));
    }
  }

  c.b.assign(order + 2, std::vector<Vector>(m + 1, Vector::Zero(d)));
  c.a.assign(order + 1, std::vector<Vector>(m + 1, Vector::Zero(d)));
  for (std::size_t n = 0; n <= order; ++n) {
    const Vector a0 = n < a_init.size() ? a_init[n] : Vector::Zero(d);
    std::vector<Vector> integrand(m + 1);
    for (std::size_t i = 0; i <= m; ++i) integrand[i] = tinv[i] * (pdot[i] * c.b[n][i]);
    const std::vector<Vector> acc = grid::cumulative_simpson(integrand, h);
    for (std::size_t i = 0; i <= m; ++i) c.a[n][i] = c.transport.T[i] * (a0 + acc[i]);

    const std::vector<Vector> bdot = grid::derivative(c.b[n], h);
    std::vector<Vector> rhs(m + 1);
    double scale = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
      const Matrix pperp = Matrix::Identity(d, d) - c.P[i];
      rhs[i] = pdot[i] * c.a[n][i] + pperp * bdot[i];
      scale = std::max(scale, rhs[i].norm());
    }
    // The kernel part of rhs is finite-difference noise; judge it against
    // the size of the whole coefficient, not the local value.
    for (std::size_t i = 0; i <= m; ++i) {
      c.b[n + 1][i] = reduced_inverse(l1s[i], rhs[i], gap_tol, kRangeTol, scale);
    }
  }
  return c;
}

ExpansionEvaluation evaluate_expansion(const ExpansionCoefficients& coeffs,
                                       const StepGenerator& gen, const BrownianPath& path,
                                       const PropagatorTrajectory& traj, std::size_t truncation) {
  if (coeffs.steps != path.steps || gen.steps() != path.steps || traj.steps != path.steps) {
    throw GridMismatch("coefficients, generator, trajectory and path must share the grid");
  }
  if (traj.eps != gen.eps() || traj.seed != path.seed || traj.stream_id != path.stream_id) {
    throw GridMismatch("trajectory was computed for a different eps or path");
  }
  const std::size_t order = std::min(truncation, coeffs.order);
  const std::size_t m = path.steps;
  const double eps = gen.eps();
  const auto d = static_cast<Eigen::Index>(gen.dim());

  ExpansionEvaluation ev;
  ev.eps = eps;
  ev.order = order;
  ev.seed = path.seed;
  ev.stream_id = path.stream_id;
  ev.deterministic.resize(order + 1);
  ev.stochastic.resize(order + 1);
  ev.X.assign(m + 1, Vector::Zero(d));

  double w = 1.0;
  for (std::size_t n = 0; n <= order; ++n) {
    auto& det = ev.deterministic[n];
    det.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) det[i] = coeffs.a[n][i] + coeffs.b[n][i];
    if (n == 0) {
      ev.stochastic[n].assign(m + 1, Vector::Zero(d));
    } else {
      std::vector<Vector> f(m + 1);
      for (std::size_t i = 0; i <= m; ++i) f[i] = gen.l2(i) * coeffs.b[n][i];
      ev.stochastic[n] = backward_propagated_integral(traj, gen, f, path, Quadrature::Milstein);
    }
    const double ws = w / std::sqrt(eps);
    for (std::size_t i = 0; i <= m; ++i) {
      ev.X[i] += w * det[i];
      if (n > 0) ev.X[i] += ws * ev.stochastic[n][i];
    }
    w *= eps;
  }
  return ev;
}

RemainderStudy remainder_scaling(const OperatorFamily& l1, const OperatorFamily& l2,
                                 const std::vector<Vector>& a_init, const RemainderOptions& opt,
                                 const GeneratorFactory& factory) {
  if (opt.eps_list.size() < 4) throw InsufficientSamples("remainder_scaling needs >= 4 eps values");
  if (opt.paths < 2) throw InsufficientSamples("remainder_scaling needs >= 2 paths");
  const double eps_min = *std::min_element(opt.eps_list.begin(), opt.eps_list.end());
  const std::size_t fine = required_steps(eps_min, opt.steps_per_epsilon);
  const std::size_t orders = opt.order + 1;

  SchemeConfig cfg;
  cfg.scheme = opt.scheme;
  cfg.steps_per_epsilon = opt.steps_per_epsilon;

  RemainderStudy out;
  out.eps = opt.eps_list;
  out.mean.assign(orders, std::vector<double>(opt.eps_list.size()));
  out.stderr_mean.assign(orders, std::vector<double>(opt.eps_list.size()));

  for (std::size_t e = 0; e < opt.eps_list.size(); ++e) {
    const double eps = opt.eps_list[e];
    const std::size_t factor = coarsening_factor(fine, required_steps(eps, opt.steps_per_epsilon));
    const std::size_t m = fine / factor;
    out.steps.push_back(m);

    const ExpansionCoefficients coeffs =
        expansion_coefficients(l1, a_init, opt.order, m, opt.gap_tol);
    const StepGenerator gen =
        factory ? factory(eps, m) : StepGenerator::sample(l1, l2, eps, m);
    const Vector x0 = coeffs.slow_manifold_initial(eps);

    std::vector<std::vector<double>> delta(orders, std::vector<double>(opt.paths));
    parallel_for(opt.paths, opt.workers, [&](std::size_t p) {
      BrownianPath path = sample_path(fine, opt.seed, p);
      if (factor > 1) path = path.coarsened(factor);
      const PropagatorTrajectory traj = propagate_forward(gen, path, cfg);
      for (std::size_t n = 0; n < orders; ++n) {
        const ExpansionEvaluation ev = evaluate_expansion(coeffs, gen, path, traj, n);
        double sup = 0.0;
        for (std::size_t i = 0; i <= m; ++i) sup = std::max(sup, (traj.U[i] * x0 - ev.X[i]).norm());
        delta[n][p] = sup;
      }
    });
    for (std::size_t n = 0; n < orders; ++n) {
      const SampleSummary sm = summarize(delta[n]);
      out.mean[n][e] = sm.mean;
      out.stderr_mean[n][e] = sm.stderr_mean;
    }
  }
  for (std::size_t n = 0; n < orders; ++n) {
    out.fits.push_back(convergence_fit(out.eps, out.mean[n], out.stderr_mean[n]));
  }
  return out;
}

void write_coefficients_csv(std::ostream& out, const ExpansionCoefficients& coeffs) {
  using report::format_double;
  const auto d = coeffs.a.empty() ? 0 : coeffs.a[0][0].size();
  std::vector<std::string> header{"index", "s"};
  auto add_cols = [&](char name, std::size_t n) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const std::string tag = std::string(1, name) + std::to_string(n) + "_" + std::to_string(k);
      header.push_back(tag + "_re");
      header.push_back(tag + "_im");
    }
  };
  for (std::size_t n = 0; n < coeffs.a.size(); ++n) add_cols('a', n);
  for (std::size_t n = 0; n < coeffs.b.size(); ++n) add_cols('b', n);
  out << report::csv_line(header);
  for (std::size_t i = 0; i <= coeffs.steps; ++i) {
    std::vector<std::string> row{std::to_string(i), format_double(grid::point(i, coeffs.steps))};
    auto add_vals = [&](const Vector& v) {
      for (Eigen::Index k = 0; k < d; ++k) {
        row.push_back(format_double(v(k).real()));
        row.push_back(format_double(v(k).imag()));
      }
    };
    for (const auto& a : coeffs.a) add_vals(a[i]);
    for (const auto& b : coeffs.b) add_vals(b[i]);
    out << report::csv_line(row);
  }
}

}  // namespace adiab
