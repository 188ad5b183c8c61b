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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adiab/errors.hpp"
#include "adiab/rng.hpp"
#include "adiab/stats.hpp"

using namespace adiab;

namespace {

std::vector<double> exp_samples(std::size_t n, double mean, std::uint64_t seed,
                                std::uint64_t stream = 0) {
  const NormalStream s(seed, stream);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = -mean * std::log(s.uniform(i));
  return x;
}

}  // namespace

TEST_CASE("summarize computes mean, unbiased variance and standard error") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.count == 4);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  CHECK(s.stderr_mean == doctest::Approx(std::sqrt(5.0 / 12.0)));
}

TEST_CASE("exponential samples pass the calibration audit") {
  const auto x = exp_samples(4000, 0.7, 3);
  const auto a = exponential_audit(x, 0.7);
  CHECK(a.pass);
  CHECK(a.ks_threshold == doctest::Approx(1.63 / std::sqrt(4000.0)));
  CHECK(a.moment_ratio[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(a.moment_ratio[1] == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("calibration audit pass rate over seeds is high") {
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) passes += exponential_audit(exp_samples(2000, 1.0, seed), 1.0).pass;
  CHECK(passes >= 34);
}

TEST_CASE("non-exponential data fail the audit") {
  const NormalStream s(5, 0);
  std::vector<double> uni(4000), halfnormal(4000);
  for (std::size_t i = 0; i < uni.size(); ++i) {
    uni[i] = s.uniform(i);
    halfnormal[i] = std::abs(s.normal(i));
  }
  CHECK_FALSE(exponential_audit(uni).pass);
  CHECK_FALSE(exponential_audit(halfnormal).pass);
  CHECK_FALSE(exponential_audit(exp_samples(4000, 1.0, 2), 1.2).mean_pass);
}

TEST_CASE("all-zero samples are flagged, not passed") {
  const auto a = exponential_audit(std::vector<double>(200, 0.0), 0.0);
  CHECK(a.insufficient_variance);
  CHECK_FALSE(a.pass);
  CHECK(a.mean_pass);
}

TEST_CASE("exponential audit input validation") {
  CHECK_THROWS_AS(exponential_audit(std::vector<double>(99, 1.0)), InsufficientSamples);
  auto x = exp_samples(200, 1.0, 1);
  x[5] = -1e-3;
  CHECK_THROWS_AS(exponential_audit(x), InvalidSample);
  x[5] = std::nan("");
  CHECK_THROWS_AS(exponential_audit(x), InvalidSample);
}

TEST_CASE("KS distance of exact quantiles is half a step") {
  const std::size_t n = 500;
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = -std::log(1.0 - (i + 0.5) / static_cast<double>(n));
  CHECK(ks_exponential_distance(q, 1.0) == doctest::Approx(0.5 / n).epsilon(1e-9));
}

TEST_CASE("independence audit detects dependence") {
  const auto x = exp_samples(4000, 1.0, 1, 0);
  const auto y = exp_samples(4000, 2.0, 1, 1);
  const auto ok = independence_audit(x, y);
  CHECK(ok.pass);
  CHECK(ok.correlation_stderr == doctest::Approx(1.0 / std::sqrt(4000.0)));
  const auto bad = independence_audit(x, x);
  CHECK_FALSE(bad.pass);
  CHECK(bad.correlation == doctest::Approx(1.0));
  CHECK_THROWS_AS(independence_audit(std::vector<double>(10, 1.0), std::vector<double>(10, 1.0)),
                  InsufficientSamples);
  CHECK_THROWS_AS(independence_audit(x, std::vector<double>(10, 1.0)), InvalidSample);
}

TEST_CASE("convergence_fit recovers power laws") {
  const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> y;
  for (double e : eps) y.push_back(3.0 * std::pow(e, 1.5));
  const auto f = convergence_fit(eps, y);
  CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.slope_stderr < 1e-10);
  std::vector<double> se(eps.size(), 0.0);
  for (std::size_t i = 0; i < eps.size(); ++i) se[i] = 0.1 * y[i];
  CHECK(convergence_fit(eps, y, se).slope == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("convergence_fit input validation") {
  CHECK_THROWS_AS(convergence_fit({0.1, 0.05, 0.025, 0.0}, {1, 1, 1, 1}), NonPositiveData);
  CHECK_THROWS_AS(convergence_fit({0.1, 0.05, 0.025, 0.01}, {1, -1, 1, 1}), NonPositiveData);
  CHECK_THROWS_AS(convergence_fit({0.1, 0.05, 0.025}, {1, 1, 1}), InsufficientSamples);
  CHECK_THROWS_AS(convergence_fit({0.1, 0.05}, {1}), InvalidSample);
}
