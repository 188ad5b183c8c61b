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
#include <optional>
#include <vector>

namespace adiab {

/// Mean and standard error of i.i.d. samples (sample variance, n - 1).
struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double stderr_mean = 0.0;
};
SampleSummary summarize(const std::vector<double>& x);

/// Exponential-law audit of one tunneling level.
struct ExponentialAudit {
  std::size_t count = 0;
  double mean = 0.0;
  double mean_stderr = 0.0;
  std::optional<double> mean_theory;
  bool mean_pass = true;
  /// moment_ratio[0] is m2 / (2 mu^2), moment_ratio[1] is m3 / (6 mu^3).
  double moment_ratio[2] = {0.0, 0.0};
  double moment_ratio_stderr[2] = {0.0, 0.0};
  bool moment_pass = false;
  double ks_distance = 0.0;
  double ks_threshold = 0.0;
  bool ks_pass = false;
  bool insufficient_variance = false;
  bool pass = false;
};

/// Sample mean against `mean_theory` (3 sigma), raw-moment ratios
/// m_n / (n! mu^n) for n = 2, 3 (3 sigma, delta-method errors that account
/// for mu being estimated), and the sup distance between the empirical CDF
/// and Exp(mu) against 1.63 / sqrt(N).
///
/// Throws InsufficientSamples below 100 samples and InvalidSample for
/// negative or non-finite entries. All-zero input sets
/// `insufficient_variance` and skips the fit.
ExponentialAudit exponential_audit(const std::vector<double>& samples,
                                   std::optional<double> mean_theory = std::nullopt);

/// Sup distance between the empirical CDF of `samples` and Exp(mean).
double ks_exponential_distance(std::vector<double> samples, double mean);

struct IndependenceAudit {
  std::size_t count = 0;
  double correlation = 0.0;
  double correlation_stderr = 0.0;
  double product_moment_ratio = 0.0;
  double product_moment_ratio_stderr = 0.0;
  bool pass = false;
};

/// Pearson correlation (null standard error 1/sqrt(N)) and the ratio
/// E[xy] / (E[x] E[y]); passes when |rho| < 3/sqrt(N) and the ratio is within
/// 3 sigma of 1. Throws InsufficientSamples below 1000 pairs.
IndependenceAudit independence_audit(const std::vector<double>& x, const std::vector<double>& y,
                                     std::size_t min_samples = 1000);

struct ConvergenceFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Weighted least squares of log y on log x, weights from the relative
/// standard errors of y (unweighted when none are given or all vanish).
/// The slope error is scaled by the residual variance. Throws
/// InsufficientSamples for fewer than 4 points and NonPositiveData for any
/// x <= 0 or y <= 0.
ConvergenceFit convergence_fit(const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& y_stderr = {});

}  // namespace adiab
