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
#include <numeric>
#include <stdexcept>

#include "adiab/brownian.hpp"
#include "adiab/rng.hpp"

using namespace adiab;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) ==
        C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             K{0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             K{0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal streams are deterministic and distinct per stream") {
  const NormalStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (std::uint64_t i = 0; i < 50; ++i) CHECK(a.normal(i) == b.normal(i));
  int same_c = 0, same_d = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    same_c += a.normal(i) == c.normal(i);
    same_d += a.normal(i) == d.normal(i);
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
  // Random access: out-of-order reads agree.
  CHECK(a.normal(1000) == NormalStream(7, 3).normal(1000));
}

TEST_CASE("normal and uniform moments") {
  const NormalStream s(11, 0);
  const std::size_t n = 200000;
  double m1 = 0, m2 = 0, m4 = 0, u1 = 0;
  std::size_t out_of_range = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double z = s.normal(i);
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
    const double u = s.uniform(i);
    out_of_range += (u <= 0.0 || u >= 1.0);
    u1 += u;
  }
  CHECK(out_of_range == 0);
  const double nd = static_cast<double>(n);
  CHECK(std::abs(m1 / nd) < 4.0 / std::sqrt(nd));
  CHECK(std::abs(m2 / nd - 1.0) < 4.0 * std::sqrt(2.0 / nd));
  CHECK(std::abs(m4 / nd - 3.0) < 4.0 * std::sqrt(96.0 / nd));
  CHECK(std::abs(u1 / nd - 0.5) < 4.0 * std::sqrt(1.0 / (12.0 * nd)));
}

TEST_CASE("sample_path builds a Brownian path on [0,1]") {
  const BrownianPath p = sample_path(64, 5, 2);
  CHECK(p.steps == 64);
  CHECK(p.dt == doctest::Approx(1.0 / 64));
  REQUIRE(p.values.size() == 65);
  CHECK(p.values[0] == 0.0);
  const double sum = std::accumulate(p.increments.begin(), p.increments.end(), 0.0);
  CHECK(p.values.back() == doctest::Approx(sum));
  CHECK_THROWS_AS(sample_path(0, 1, 1), std::invalid_argument);
}

TEST_CASE("refinement preserves coarse values and halves dt") {
  const BrownianPath p = sample_path(10, 3, 1);
  const BrownianPath r = p.refined();
  CHECK(r.steps == 20);
  CHECK(r.level == 1);
  for (std::size_t i = 0; i <= 10; ++i) CHECK(r.values[2 * i] == doctest::Approx(p.values[i]));
  const BrownianPath back = r.coarsened(2);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(back.increments[i] == doctest::Approx(p.increments[i]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(r.coarsened(3), std::invalid_argument);
}

TEST_CASE("refined midpoints have the Brownian bridge variance") {
  const std::size_t paths = 4000;
  double acc = 0.0;
  for (std::uint64_t id = 0; id < paths; ++id) {
    const BrownianPath r = sample_path(1, 9, id).refined();
    const double dev = r.values[1] - 0.5 * r.values[2];
    acc += dev * dev;
  }
  const double var = acc / static_cast<double>(paths);
  CHECK(std::abs(var - 0.25) < 4.0 * 0.25 * std::sqrt(2.0 / paths));
}

TEST_CASE("coarsening_factor picks the largest admissible divisor") {
  CHECK(coarsening_factor(16000, 4000) == 4);
  CHECK(coarsening_factor(16000, 2000) == 8);
  CHECK(coarsening_factor(16000, 16000) == 1);
  CHECK(coarsening_factor(12, 5) == 2);
  CHECK(coarsening_factor(7, 2) == 1);
}

TEST_CASE("path_from_increments rebuilds values") {
  const BrownianPath p = path_from_increments({0.1, -0.2, 0.3, 0.0});
  CHECK(p.steps == 4);
  CHECK(p.dt == doctest::Approx(0.25));
  CHECK(p.values[3] == doctest::Approx(0.2));
  CHECK_THROWS_AS(path_from_increments({}), std::invalid_argument);
}
