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

#include "adiab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adiab/errors.hpp"
#include "adiab/parallel.hpp"

namespace adiab {

SampleSummary summarize(const std::vector<double>& x) {
  SampleSummary out;
  out.count = x.size();
  if (x.empty()) return out;
  const double n = static_cast<double>(x.size());
  out.mean = pairwise_sum(x) / n;
  if (x.size() > 1) {
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - out.mean) * (x[i] - out.mean);
    out.variance = pairwise_sum(sq) / (n - 1.0);
    out.stderr_mean = std::sqrt(out.variance / n);
  }
  return out;
}

double ks_exponential_distance(std::vector<double> samples, double mean) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = -std::expm1(-samples[i] / mean);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

ExponentialAudit exponential_audit(const std::vector<double>& samples,
                                   std::optional<double> mean_theory) {
  if (samples.size() < 100) {
    throw InsufficientSamples("exponential_audit needs >= 100 samples, got " +
                              std::to_string(samples.size()));
  }
  for (double x : samples) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidSample("samples must be finite and >= 0");
  }
  ExponentialAudit out;
  out.count = samples.size();
  out.mean_theory = mean_theory;
  out.ks_threshold = 1.63 / std::sqrt(static_cast<double>(out.count));

  const SampleSummary s1 = summarize(samples);
  out.mean = s1.mean;
  out.mean_stderr = s1.stderr_mean;
  if (s1.variance == 0.0) {
    out.insufficient_variance = true;
    out.mean_pass = mean_theory ? std::abs(out.mean - *mean_theory) == 0.0 : true;
    return out;
  }
  if (mean_theory) out.mean_pass = std::abs(out.mean - *mean_theory) <= 3.0 * out.mean_stderr;

  const double mu = s1.mean;
  out.moment_pass = true;
  for (int n = 2; n <= 3; ++n) {
    const double fact = n == 2 ? 2.0 : 6.0;
    std::vector<double> pw(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) pw[i] = std::pow(samples[i], n);
    const double mn = summarize(pw).mean;
    const double denom = fact * std::pow(mu, n);
    const double ratio = mn / denom;
    std::vector<double> influence(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      influence[i] = (pw[i] - mn) / denom - n * ratio * (samples[i] - mu) / mu;
    }
    const double se = summarize(influence).stderr_mean;
    out.moment_ratio[n - 2] = ratio;
    out.moment_ratio_stderr[n - 2] = se;
    if (std::abs(ratio - 1.0) > 3.0 * se) out.moment_pass = false;
  }

  out.ks_distance = ks_exponential_distance(samples, mu);
  out.ks_pass = out.ks_distance < out.ks_threshold;
  out.pass = out.mean_pass && out.moment_pass && out.ks_pass;
  return out;
}

IndependenceAudit independence_audit(const std::vector<double>& x, const std::vector<double>& y,
                                     std::size_t min_samples) {
  if (x.size() != y.size()) throw InvalidSample("independence_audit needs paired samples");
  if (x.size() < min_samples) {
    throw InsufficientSamples("independence_audit needs >= " + std::to_string(min_samples) +
                              " pairs, got " + std::to_string(x.size()));
  }
  IndependenceAudit out;
  out.count = x.size();
  const double n = static_cast<double>(x.size());
  const SampleSummary sx = summarize(x);
  const SampleSummary sy = summarize(y);
  std::vector<double> xy(x.size()), cross(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy[i] = x[i] * y[i];
    cross[i] = (x[i] - sx.mean) * (y[i] - sy.mean);
  }
  const double cov = pairwise_sum(cross) / (n - 1.0);
  out.correlation = (sx.variance > 0 && sy.variance > 0)
                        ? cov / std::sqrt(sx.variance * sy.variance)
                        : 0.0;
  out.correlation_stderr = 1.0 / std::sqrt(n);

  const double mxy = pairwise_sum(xy) / n;
  const double ratio = mxy / (sx.mean * sy.mean);
  std::vector<double> influence(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    influence[i] = (xy[i] - mxy) / (sx.mean * sy.mean) - ratio * (x[i] - sx.mean) / sx.mean -
                   ratio * (y[i] - sy.mean) / sy.mean;
  }
  out.product_moment_ratio = ratio;
  out.product_moment_ratio_stderr = summarize(influence).stderr_mean;
  out.pass = std::abs(out.correlation) < 3.0 * out.correlation_stderr &&
             std::abs(ratio - 1.0) <= 3.0 * out.product_moment_ratio_stderr;
  return out;
}

ConvergenceFit convergence_fit(const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& y_stderr) {
  if (x.size() != y.size() || (!y_stderr.empty() && y_stderr.size() != y.size())) {
    throw InvalidSample("convergence_fit: mismatched input lengths");
  }
  if (x.size() < 4) throw InsufficientSamples("convergence_fit needs >= 4 points");
  const std::size_t n = x.size();
  std::vector<double> u(n), v(n), w(n, 1.0);
  bool weighted = !y_stderr.empty();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NonPositiveData("convergence_fit: data must be > 0");
    u[i] = std::log(x[i]);
    v[i] = std::log(y[i]);
    if (weighted && !(y_stderr[i] > 0.0)) weighted = false;
  }
  if (weighted) {
    for (std::size_t i = 0; i < n; ++i) {
      const double rel = y_stderr[i] / y[i];
      w[i] = 1.0 / (rel * rel);
    }
  }
  double sw = 0, su = 0, sv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    su += w[i] * u[i];
    sv += w[i] * v[i];
  }
  const double ubar = su / sw, vbar = sv / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (u[i] - ubar) * (u[i] - ubar);
    sxy += w[i] * (u[i] - ubar) * (v[i] - vbar);
  }
  ConvergenceFit out;
  out.slope = sxy / sxx;
  out.intercept = vbar - out.slope * ubar;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = v[i] - out.intercept - out.slope * u[i];
    rss += w[i] * r * r;
  }
  out.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return out;
}

}  // namespace adiab
