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

#include "adiab/ito.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "adiab/errors.hpp"
#include "adiab/parallel.hpp"
#include "adiab/report.hpp"
#include "adiab/stats.hpp"

namespace adiab {

GridProcess GridProcess::deterministic(std::size_t steps, const std::function<Matrix(double)>& f) {
  GridProcess x;
  x.adaptation = Adaptation::Deterministic;
  x.values.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) x.values.push_back(f(static_cast<double>(i) / steps));
  return x;
}

GridProcess GridProcess::constant(std::size_t steps, const Matrix& c) {
  GridProcess x;
  x.adaptation = Adaptation::Deterministic;
  x.values.assign(steps + 1, c);
  return x;
}

namespace {

void check_grid(const GridProcess& x, const BrownianPath& path) {
  if (x.values.size() != path.steps + 1) {
    throw GridMismatch("integrand has " + std::to_string(x.values.size()) +
                       " samples, path grid needs " + std::to_string(path.steps + 1));
  }
}

Matrix integrate(const GridProcess& x, const BrownianPath& path, IntegralKind kind) {
  return kind == IntegralKind::Forward ? forward_ito(x, path) : backward_ito(x, path);
}

// Quadrature of int ||X||^{2n} ds matching the integral's evaluation points.
double power_energy(const GridProcess& x, double dt, int n, IntegralKind kind) {
  const std::size_t m = x.steps();
  double acc = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    const double sq = x.values[kind == IntegralKind::Forward ? i - 1 : i].squaredNorm();
    acc += std::pow(sq, n);
  }
  return acc * dt;
}

double sup_norm(const GridProcess& x) {
  double s = 0.0;
  for (const auto& v : x.values) s = std::max(s, v.norm());
  return s;
}

struct PathRecord {
  Matrix integral;
  double energy = 0.0;
};

std::vector<PathRecord> run_paths(const ProcessSampler& sampler, const AuditOptions& opt, int n) {
  std::vector<PathRecord> rec(opt.paths);
  parallel_for(opt.paths, opt.workers, [&](std::size_t p) {
    const BrownianPath path = sample_path(opt.steps, opt.seed, opt.stream_offset + p);
    const GridProcess x = sampler(path);
    rec[p].integral = integrate(x, path, opt.kind);
    rec[p].energy = power_energy(x, path.dt, n, opt.kind);
  });
  return rec;
}

}  // namespace

Matrix forward_ito(const GridProcess& x, const BrownianPath& path) {
  if (x.adaptation == Adaptation::Backward) {
    throw AdaptationMismatch("forward Ito integral of a backward-adapted integrand");
  }
  check_grid(x, path);
  Matrix acc = Matrix::Zero(x.values[0].rows(), x.values[0].cols());
  for (std::size_t i = 0; i < path.steps; ++i) acc += x.values[i] * path.increments[i];
  return acc;
}

Matrix backward_ito(const GridProcess& y, const BrownianPath& path) {
  if (y.adaptation == Adaptation::Forward) {
    throw AdaptationMismatch("backward Ito integral of a forward-adapted integrand");
  }
  check_grid(y, path);
  Matrix acc = Matrix::Zero(y.values[0].rows(), y.values[0].cols());
  for (std::size_t i = 0; i < path.steps; ++i) acc += y.values[i + 1] * path.increments[i];
  return acc;
}

IsometryAudit isometry_audit(const ProcessSampler& sampler, const AuditOptions& opt) {
  const auto rec = run_paths(sampler, opt, 1);
  const std::size_t n = rec.size();
  IsometryAudit out;

  // Mean of the integral, entrywise.
  const auto rows = rec[0].integral.rows(), cols = rec[0].integral.cols();
  double var_sum = 0.0;
  Matrix mean = Matrix::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::vector<double> re(n), im(n);
      for (std::size_t p = 0; p < n; ++p) {
        re[p] = rec[p].integral(r, c).real();
        im[p] = rec[p].integral(r, c).imag();
      }
      const auto sre = summarize(re), sim = summarize(im);
      mean(r, c) = cplx(sre.mean, sim.mean);
      var_sum += sre.stderr_mean * sre.stderr_mean + sim.stderr_mean * sim.stderr_mean;
    }
  }
  out.mean_err = mean.norm();
  out.mean_stderr = std::sqrt(var_sum);

  std::vector<double> lhs(n), energy(n);
  for (std::size_t p = 0; p < n; ++p) {
    lhs[p] = rec[p].integral.squaredNorm();
    energy[p] = rec[p].energy;
  }
  const auto sl = summarize(lhs), se = summarize(energy);
  out.integrand_energy = se.mean;
  if (se.mean <= 0.0) {
    out.degenerate = true;
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    out.ratio_stderr = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.ratio = sl.mean / se.mean;
  std::vector<double> influence(n);
  for (std::size_t p = 0; p < n; ++p) influence[p] = (lhs[p] - out.ratio * energy[p]) / se.mean;
  out.ratio_stderr = summarize(influence).stderr_mean;
  return out;
}

MomentBoundAudit moment_bound_audit(const ProcessSampler& sampler, int n,
                                    const AuditOptions& opt) {
  if (n < 1) throw std::invalid_argument("moment_bound_audit: n must be >= 1");
  const auto rec = run_paths(sampler, opt, n);
  std::vector<double> lhs(rec.size()), rhs(rec.size());
  for (std::size_t p = 0; p < rec.size(); ++p) {
    lhs[p] = std::pow(rec[p].integral.squaredNorm(), n);
    rhs[p] = rec[p].energy;
  }
  MomentBoundAudit out;
  out.n = n;
  out.constant = std::pow(2.0 * n * n - n, n);
  const auto sl = summarize(lhs), sr = summarize(rhs);
  out.lhs = sl.mean;
  out.lhs_stderr = sl.stderr_mean;
  out.rhs = out.constant * sr.mean;
  out.rhs_stderr = out.constant * sr.stderr_mean;
  const double sigma = std::hypot(out.lhs_stderr, out.rhs_stderr);
  out.satisfied = out.lhs <= out.rhs + 3.0 * sigma;
  return out;
}

std::vector<TailBoundRow> tail_bound_audit(const ProcessSampler& sampler,
                                           const std::vector<double>& gammas,
                                           std::optional<double> sup_norm_bound,
                                           const AuditOptions& opt) {
  if (!sup_norm_bound) throw MissingSupBound("tail_bound_audit requires a uniform bound on ||X||");
  const double sup = *sup_norm_bound;
  std::vector<double> sq(opt.paths);
  std::vector<double> observed_sup(opt.paths);
  parallel_for(opt.paths, opt.workers, [&](std::size_t p) {
    const BrownianPath path = sample_path(opt.steps, opt.seed, opt.stream_offset + p);
    const GridProcess x = sampler(path);
    sq[p] = integrate(x, path, opt.kind).squaredNorm();
    observed_sup[p] = sup_norm(x);
  });
  for (double s : observed_sup) {
    if (s > sup * (1.0 + 1e-12)) {
      throw MissingSupBound("integrand exceeds the configured sup bound");
    }
  }
  std::vector<TailBoundRow> rows;
  const double n = static_cast<double>(opt.paths);
  for (double gamma : gammas) {
    TailBoundRow row;
    row.gamma = gamma;
    std::size_t hits = 0;
    for (double v : sq) hits += v > gamma ? 1 : 0;
    row.empirical = static_cast<double>(hits) / n;
    row.stderr_empirical = std::sqrt(row.empirical * (1.0 - row.empirical) / n);
    if (sup > 0.0) {
      row.bound = std::exp(-gamma / (8.0 * sup * sup) + 0.25);
    } else {
      row.bound = gamma > 0.0 ? 0.0 : std::exp(0.25);
    }
    row.satisfied = row.empirical <= row.bound + 3.0 * row.stderr_empirical;
    rows.push_back(row);
  }
  return rows;
}

AuditRow to_row(const std::string& name, const IsometryAudit& a) {
  const bool ok = !a.degenerate && std::abs(a.ratio - 1.0) <= 3.0 * a.ratio_stderr &&
                  a.mean_err <= 3.0 * a.mean_stderr;
  return {name, 1.0, a.ratio, 1.0, a.ratio_stderr, ok};
}

AuditRow to_row(const std::string& name, const MomentBoundAudit& a) {
  return {name, static_cast<double>(a.n), a.lhs, a.rhs, std::hypot(a.lhs_stderr, a.rhs_stderr),
          a.satisfied};
}

AuditRow to_row(const std::string& name, const TailBoundRow& a) {
  return {name, a.gamma, a.empirical, a.bound, a.stderr_empirical, a.satisfied};
}

void write_audit_csv(std::ostream& out, const std::vector<AuditRow>& rows) {
  using report::format_double;
  out << "audit_name,n_or_gamma,lhs,rhs,stderr,satisfied\n";
  for (const auto& r : rows) {
    out << report::csv_line({r.audit_name, format_double(r.n_or_gamma), format_double(r.lhs),
                             format_double(r.rhs), format_double(r.stderr_value),
                             r.satisfied ? "true" : "false"});
  }
}

}  // namespace adiab
