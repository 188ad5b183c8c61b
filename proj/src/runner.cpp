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

#include "adiab/runner.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adiab/errors.hpp"
#include "adiab/expansion.hpp"
#include "adiab/grid.hpp"
#include "adiab/ito.hpp"
#include "adiab/parallel.hpp"
#include "adiab/report.hpp"
#include "adiab/rng.hpp"
#include "adiab/stats.hpp"

namespace adiab {

namespace {

using report::format_double;

AuditEntry sigma_gate(std::string name, double estimate, double target, double stderr_value,
                      double sigmas = 3.0) {
  AuditEntry a{std::move(name), false, estimate, target, stderr_value};
  a.pass = std::isfinite(estimate) && std::abs(estimate - target) <= sigmas * stderr_value;
  return a;
}

AuditEntry upper_gate(std::string name, double estimate, double threshold) {
  AuditEntry a{std::move(name), false, estimate, threshold, 0.0};
  a.pass = std::isfinite(estimate) && estimate <= threshold;
  return a;
}

AuditEntry band_gate(std::string name, double estimate, double target, double half_width,
                     double stderr_value) {
  AuditEntry a{std::move(name), false, estimate, target, stderr_value};
  a.pass = std::isfinite(estimate) && std::abs(estimate - target) <= half_width;
  return a;
}

std::size_t workers_of(const ExperimentConfig& cfg) {
  return cfg.workers == 0 ? default_workers() : cfg.workers;
}

SchemeConfig scheme_of(const ExperimentConfig& cfg) {
  SchemeConfig s;
  s.scheme = cfg.scheme;
  s.steps_per_epsilon = cfg.steps_per_epsilon;
  return s;
}

void ensure_dir(const std::filesystem::path& dir) { std::filesystem::create_directories(dir); }

Matrix scalar(double x) { return Matrix::Constant(1, 1, cplx(x, 0.0)); }

struct BatteryItem {
  std::string name;
  ProcessSampler sampler;
  bool deterministic;
};

std::vector<BatteryItem> integrand_battery() {
  return {
      {"one", [](const BrownianPath& p) { return GridProcess::constant(p.steps, scalar(1.0)); }, true},
      {"s",
       [](const BrownianPath& p) {
         return GridProcess::deterministic(p.steps, [](double s) { return scalar(s); });
       },
       true},
      {"brownian",
       [](const BrownianPath& p) {
         GridProcess x;
         x.adaptation = Adaptation::Forward;
         for (double b : p.values) x.values.push_back(scalar(b));
         return x;
       },
       false},
  };
}

// Mean of |t_k|^2 over [0, 1] by Simpson on the frame grid.
double mean_transition_rate(const TransitionCoefficients& c, std::size_t k, double h) {
  std::vector<double> v;
  v.reserve(c.t.size());
  for (const auto& t : c.t) v.push_back(std::norm(t(static_cast<Eigen::Index>(k))));
  return grid::cumulative_simpson(v, h).back();
}

Vector reference_initial(const DephasingModel& model, std::size_t steps) {
  const SpectralFrame f = build_frame(model, steps);
  return f.psi[0].col(static_cast<Eigen::Index>(f.reference));
}

}  // namespace

ConversionStudy conversion_study(const DephasingModel& model, const std::vector<double>& eps_list,
                                 std::size_t paths, std::uint64_t seed,
                                 std::size_t steps_per_epsilon, std::size_t workers) {
  const double eps_min = *std::min_element(eps_list.begin(), eps_list.end());
  const std::size_t fine = required_steps(eps_min, steps_per_epsilon);
  SchemeConfig cfg;
  cfg.steps_per_epsilon = steps_per_epsilon;
  const OperatorFamily l1 = model.l1();

  ConversionStudy out;
  out.eps = eps_list;
  for (double eps : eps_list) {
    const std::size_t factor = coarsening_factor(fine, required_steps(eps, steps_per_epsilon));
    const std::size_t m = fine / factor;
    const SpectralFrame frame = build_frame(model, m);
    const StepGenerator gen = spectral_generator(frame, eps);
    const ExpansionCoefficients coeffs = expansion_coefficients(
        l1, {Vector(frame.psi[0].col(static_cast<Eigen::Index>(frame.reference)))}, 1, m);
    GridProcess f;
    f.adaptation = Adaptation::Deterministic;
    for (std::size_t i = 0; i <= m; ++i) f.values.push_back(gen.l2(i) * coeffs.b[1][i]);

    std::vector<double> disc(paths);
    parallel_for(paths, workers, [&](std::size_t p) {
      BrownianPath path = sample_path(fine, seed, p);
      if (factor > 1) path = path.coarsened(factor);
      disc[p] = backward_to_forward(f, gen, path, cfg).discrepancy;
    });
    const SampleSummary sm = summarize(disc);
    out.mean.push_back(sm.mean);
    out.stderr_mean.push_back(sm.stderr_mean);
  }
  out.fit = convergence_fit(out.eps, out.mean, out.stderr_mean);
  return out;
}

std::vector<AuditEntry> run_verify(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  std::vector<AuditEntry> audits;
  const std::size_t workers = workers_of(cfg);

  AuditOptions opt;
  opt.steps = cfg.verify_steps;
  opt.paths = cfg.verify_paths;
  opt.seed = cfg.seed;
  opt.workers = workers;

  std::vector<AuditRow> rows;
  for (const auto& item : integrand_battery()) {
    for (IntegralKind kind : {IntegralKind::Forward, IntegralKind::Backward}) {
      if (kind == IntegralKind::Backward && !item.deterministic) continue;
      AuditOptions o = opt;
      o.kind = kind;
      const std::string tag =
          std::string(kind == IntegralKind::Forward ? "forward" : "backward") + "_" + item.name;
      const IsometryAudit iso = isometry_audit(item.sampler, o);
      rows.push_back(to_row("isometry_" + tag, iso));
      audits.push_back(sigma_gate("isometry_" + tag, iso.ratio, 1.0, iso.ratio_stderr));
      audits.push_back(sigma_gate("zero_mean_" + tag, iso.mean_err, 0.0, iso.mean_stderr));
    }
    for (int n = 1; n <= 3; ++n) {
      const MomentBoundAudit mb = moment_bound_audit(item.sampler, n, opt);
      rows.push_back(to_row("moment_bound_" + item.name, mb));
      AuditEntry a{"moment_bound_" + item.name + "_n" + std::to_string(n), mb.satisfied, mb.lhs,
                   mb.rhs, std::hypot(mb.lhs_stderr, mb.rhs_stderr)};
      audits.push_back(a);
    }
    if (item.deterministic) {
      for (const TailBoundRow& t : tail_bound_audit(item.sampler, {1, 2, 4, 8}, 1.0, opt)) {
        rows.push_back(to_row("tail_bound_" + item.name, t));
        audits.push_back(AuditEntry{"tail_bound_" + item.name + "_gamma" + format_double(t.gamma),
                                    t.satisfied, t.empirical, t.bound, t.stderr_empirical});
      }
    }
  }
  {
    std::ostringstream csv;
    write_audit_csv(csv, rows);
    report::write_file(cfg.out_dir / "stochastic_audits.csv", csv.str());
  }

  // Propagator audits on the configured model at the first eps.
  const DephasingModel model = cfg.build_model();
  const double eps = cfg.epsilons.front();
  const SchemeConfig scheme = scheme_of(cfg);
  const std::size_t m = required_steps(eps, cfg.steps_per_epsilon);
  const SpectralFrame frame = build_frame(model, m);
  const StepGenerator gen = spectral_generator(frame, eps);
  const BrownianPath path = sample_path(m, cfg.seed, 0);

  audits.push_back(upper_gate("duhamel_residual", duhamel_audit(gen, path, scheme), 0.05));
  const PropagatorTrajectory traj = propagate_forward(gen, path, scheme);
  audits.push_back(upper_gate("semigroup", semigroup_audit(traj, m / 2), 1e-9));
  const ContractionAudit ca = contraction_audit(traj, gen, scheme);
  if (cfg.scheme == Scheme::Exponential) {
    audits.push_back(upper_gate("contraction", ca.max_norm - 1.0, 1e-9));
  } else {
    audits.push_back(upper_gate("contraction", ca.max_norm, 1.0 + 10.0 * path.dt));
  }

  const std::vector<double> conv_eps{eps, eps / 2, eps / 4, eps / 8};
  const ConversionStudy cs =
      conversion_study(model, conv_eps, std::min<std::size_t>(cfg.paths, 50), cfg.seed,
                       cfg.steps_per_epsilon, workers);
  audits.push_back(band_gate("conversion_slope", cs.fit.slope, 0.5, 0.2, cs.fit.slope_stderr));
  return audits;
}

std::vector<AuditEntry> run_tunneling(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  std::vector<AuditEntry> audits;
  const DephasingModel model = cfg.build_model();
  for (double eps : cfg.epsilons) {
    TunnelingOptions opt;
    opt.eps = eps;
    opt.paths = cfg.paths;
    opt.seed = cfg.seed;
    opt.workers = workers_of(cfg);
    opt.scheme = scheme_of(cfg);
    opt.forward_form = true;
    const TunnelingEnsemble ens = tunneling_ensemble(model, opt);
    {
      std::ostringstream csv;
      write_samples_csv(csv, ens);
      report::write_file(cfg.out_dir / ("samples_" + format_double(eps) + ".csv"), csv.str());
    }
    const SpectralFrame frame = build_frame(model, ens.steps);
    const TransitionCoefficients coeffs = transition_coefficients(frame);
    const std::string suffix = "_eps" + format_double(eps);
    const double norm_threshold = cfg.scheme == Scheme::Exponential ? 1e-9 : 10.0 / ens.steps;
    audits.push_back(upper_gate("norm_preservation" + suffix, ens.max_norm_deviation, norm_threshold));
    if (cfg.scheme == Scheme::Exponential) {
      audits.push_back(upper_gate("frame_completeness" + suffix, ens.max_completeness_error, 1e-9));
    }

    std::vector<std::size_t> levels;
    for (std::size_t k = 0; k < model.dim(); ++k) {
      if (k != ens.reference) levels.push_back(k);
    }
    for (std::size_t k : levels) {
      const std::string lk = "_k" + std::to_string(k) + suffix;
      const double theory = mean_transition_rate(coeffs, k, grid::step(ens.steps));
      const std::vector<double> t = ens.level(k);
      const SampleSummary sm = summarize(t);
      audits.push_back(sigma_gate("mean_tunneling" + lk, sm.mean, theory, sm.stderr_mean));
      std::vector<double> fwd;
      for (const auto& row : ens.forward) fwd.push_back(row[k]);
      const SampleSummary sf = summarize(fwd);
      audits.push_back(sigma_gate("mean_forward_form" + lk, sf.mean, theory, sf.stderr_mean));
      if (t.size() >= 100) {
        const ExponentialAudit ea = exponential_audit(t);
        audits.push_back(upper_gate("exponential_ks" + lk, ea.ks_distance, ea.ks_threshold));
        audits.push_back(sigma_gate("exponential_moment2" + lk, ea.moment_ratio[0], 1.0,
                                    ea.moment_ratio_stderr[0]));
        audits.push_back(sigma_gate("exponential_moment3" + lk, ea.moment_ratio[1], 1.0,
                                    ea.moment_ratio_stderr[1]));
      }
    }
    for (std::size_t a = 0; a < levels.size(); ++a) {
      for (std::size_t b = a + 1; b < levels.size(); ++b) {
        const auto x = ens.level(levels[a]), y = ens.level(levels[b]);
        if (x.size() < 1000) continue;
        const IndependenceAudit ia = independence_audit(x, y);
        const std::string pair =
            "_k" + std::to_string(levels[a]) + std::to_string(levels[b]) + suffix;
        audits.push_back(sigma_gate("independence_corr" + pair, ia.correlation, 0.0,
                                    ia.correlation_stderr));
        audits.push_back(sigma_gate("independence_product" + pair, ia.product_moment_ratio, 1.0,
                                    ia.product_moment_ratio_stderr));
      }
    }
  }
  return audits;
}

std::vector<AuditEntry> run_expansion(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  std::vector<AuditEntry> audits;
  const DephasingModel model = cfg.build_model();
  const double eps = cfg.epsilons.front();
  const std::size_t m = required_steps(eps, cfg.steps_per_epsilon);
  const OperatorFamily l1 = model.l1();
  const ExpansionCoefficients coeffs =
      expansion_coefficients(l1, {reference_initial(model, m)}, cfg.order, m);
  {
    std::ostringstream csv;
    write_coefficients_csv(csv, coeffs);
    report::write_file(cfg.out_dir / "coefficients.csv", csv.str());
  }
  double kernel_defect = 0.0, range_defect = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    for (const auto& a : coeffs.a) kernel_defect = std::max(kernel_defect, (coeffs.P[i] * a[i] - a[i]).norm());
    for (const auto& b : coeffs.b) range_defect = std::max(range_defect, (coeffs.P[i] * b[i]).norm());
  }
  audits.push_back(upper_gate("kernel_coefficients", kernel_defect, 1e-8));
  audits.push_back(upper_gate("range_coefficients", range_defect, 1e-8));
  audits.push_back(upper_gate("transport_intertwining", coeffs.transport.intertwining_error, 1e-8));

  const SpectralFrame frame = build_frame(model, m);
  const StepGenerator gen = spectral_generator(frame, eps);
  const SchemeConfig scheme = scheme_of(cfg);
  const Vector x0 = coeffs.slow_manifold_initial(eps);
  const std::size_t paths = cfg.expansion_paths;
  std::vector<double> sup(paths);
  parallel_for(paths, workers_of(cfg), [&](std::size_t p) {
    const BrownianPath path = sample_path(m, cfg.seed, p);
    const PropagatorTrajectory traj = propagate_forward(gen, path, scheme);
    const ExpansionEvaluation ev = evaluate_expansion(coeffs, gen, path, traj);
    double s = 0.0;
    for (std::size_t i = 0; i <= m; ++i) s = std::max(s, (traj.U[i] * x0 - ev.X[i]).norm());
    sup[p] = s;
  });
  std::ostringstream csv;
  csv << report::csv_line({"path_id", "epsilon", "order", "sup_remainder"});
  for (std::size_t p = 0; p < paths; ++p) {
    csv << report::csv_line({std::to_string(p), format_double(eps), std::to_string(cfg.order),
                             format_double(sup[p])});
  }
  report::write_file(cfg.out_dir / "expansion_paths.csv", csv.str());
  return audits;
}

std::vector<AuditEntry> run_convergence(const ExperimentConfig& cfg) {
  if (cfg.epsilons.size() < 4) throw ConfigInvalid("epsilon: convergence needs >= 4 values");
  ensure_dir(cfg.out_dir);
  std::vector<AuditEntry> audits;
  const DephasingModel model = cfg.build_model();
  const std::size_t workers = workers_of(cfg);

  RemainderOptions ro;
  ro.eps_list = cfg.epsilons;
  ro.order = cfg.order;
  ro.paths = cfg.convergence_paths;
  ro.seed = cfg.seed;
  ro.steps_per_epsilon = cfg.steps_per_epsilon;
  ro.workers = workers;
  ro.scheme = cfg.scheme;
  const double eps_min = *std::min_element(cfg.epsilons.begin(), cfg.epsilons.end());
  const Vector a0 = reference_initial(model, required_steps(eps_min, cfg.steps_per_epsilon));
  const RemainderStudy rs = remainder_scaling(
      model.l1(), model.l2(), {a0}, ro, [&model](double eps, std::size_t steps) {
        return spectral_generator(build_frame(model, steps), eps);
      });

  const ConversionStudy cs = conversion_study(model, cfg.epsilons, cfg.convergence_paths,
                                              cfg.seed, cfg.steps_per_epsilon, workers);

  std::ostringstream csv;
  csv << report::csv_line({"study", "order", "epsilon", "steps", "mean", "stderr"});
  for (std::size_t n = 0; n < rs.mean.size(); ++n) {
    for (std::size_t e = 0; e < rs.eps.size(); ++e) {
      csv << report::csv_line({"remainder", std::to_string(n), format_double(rs.eps[e]),
                               std::to_string(rs.steps[e]), format_double(rs.mean[n][e]),
                               format_double(rs.stderr_mean[n][e])});
    }
    audits.push_back(band_gate("remainder_slope_order" + std::to_string(n), rs.fits[n].slope,
                               static_cast<double>(n) + 0.5, 0.2, rs.fits[n].slope_stderr));
  }
  for (std::size_t e = 0; e < cs.eps.size(); ++e) {
    csv << report::csv_line({"conversion", "1", format_double(cs.eps[e]),
                             std::to_string(required_steps(cs.eps[e], cfg.steps_per_epsilon)),
                             format_double(cs.mean[e]), format_double(cs.stderr_mean[e])});
  }
  audits.push_back(band_gate("conversion_slope", cs.fit.slope, 0.5, 0.2, cs.fit.slope_stderr));
  report::write_file(cfg.out_dir / "convergence.csv", csv.str());
  return audits;
}

std::vector<AuditEntry> run_selftest(const ExperimentConfig& cfg) {
  std::vector<AuditEntry> audits;
  const std::size_t n = 10000;
  const NormalStream sa(cfg.seed, 0), sb(cfg.seed, 1);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = -std::log(sa.uniform(i));
    y[i] = -std::log(sb.uniform(i));
  }
  const ExponentialAudit ea = exponential_audit(x, 1.0);
  audits.push_back(sigma_gate("synthetic_exponential_mean", ea.mean, 1.0, ea.mean_stderr));
  audits.push_back(upper_gate("synthetic_exponential_ks", ea.ks_distance, ea.ks_threshold));
  audits.push_back(sigma_gate("synthetic_exponential_moment2", ea.moment_ratio[0], 1.0,
                              ea.moment_ratio_stderr[0]));
  const IndependenceAudit ia = independence_audit(x, y);
  audits.push_back(sigma_gate("synthetic_independence_corr", ia.correlation, 0.0,
                              ia.correlation_stderr));
  audits.push_back(sigma_gate("synthetic_independence_product", ia.product_moment_ratio, 1.0,
                              ia.product_moment_ratio_stderr));

  std::vector<double> eps{0.1, 0.05, 0.025, 0.0125}, exact, noisy;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    exact.push_back(std::pow(eps[i], 1.5));
    noisy.push_back(2.0 * std::sqrt(eps[i]) * (1.0 + 0.05 * sa.normal(n + i)));
  }
  const ConvergenceFit fe = convergence_fit(eps, exact);
  audits.push_back(band_gate("synthetic_slope_exact", fe.slope, 1.5, 1e-10, fe.slope_stderr));
  const ConvergenceFit fn = convergence_fit(eps, noisy);
  audits.push_back(band_gate("synthetic_slope_noisy", fn.slope, 0.5, 0.1, fn.slope_stderr));
  return audits;
}

std::string audits_json(const std::string& subcommand, const std::vector<AuditEntry>& audits) {
  using nlohmann::ordered_json;
  auto num = [](double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); };
  ordered_json list = ordered_json::array();
  bool all = true;
  for (const auto& a : audits) {
    all = all && a.pass;
    list.push_back(ordered_json{{"name", a.name},
                                {"pass", a.pass},
                                {"estimate", num(a.estimate)},
                                {"threshold", num(a.threshold)},
                                {"stderr", num(a.stderr_value)}});
  }
  ordered_json doc{{"subcommand", subcommand}, {"pass", all}, {"audits", list}};
  return doc.dump(2) + "\n";
}

int run(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log) {
  std::vector<AuditEntry> audits;
  if (subcommand == "verify") {
    audits = run_verify(cfg);
  } else if (subcommand == "tunneling") {
    audits = run_tunneling(cfg);
  } else if (subcommand == "expansion") {
    audits = run_expansion(cfg);
  } else if (subcommand == "convergence") {
    audits = run_convergence(cfg);
  } else if (subcommand == "selftest") {
    audits = run_selftest(cfg);
  } else {
    throw ConfigInvalid("subcommand: unknown '" + subcommand + "'");
  }
  ensure_dir(cfg.out_dir);
  report::write_file(cfg.out_dir / "audits.json", audits_json(subcommand, audits));
  std::size_t passed = 0;
  for (const auto& a : audits) {
    log << (a.pass ? "PASS " : "FAIL ") << a.name << " estimate=" << format_double(a.estimate)
        << " threshold=" << format_double(a.threshold) << "\n";
    passed += a.pass ? 1 : 0;
  }
  log << passed << "/" << audits.size() << " audits passed\n";
  return passed == audits.size() ? 0 : 1;
}

}  // namespace adiab
