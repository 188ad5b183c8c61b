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

#include "adiab/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adiab/rng.hpp"

namespace adiab {

namespace {

// Lane 0 holds base increments; refinement level L draws from lane L.
constexpr std::uint32_t kBaseLane = 0;

void fill_values(BrownianPath& path) {
  path.values.assign(path.steps + 1, 0.0);
  for (std::size_t i = 0; i < path.steps; ++i) {
    path.values[i + 1] = path.values[i] + path.increments[i];
  }
}

}  // namespace

BrownianPath sample_path(std::size_t steps, std::uint64_t seed, std::uint64_t stream_id) {
  if (steps < 1) throw std::invalid_argument("sample_path: steps must be >= 1");
  BrownianPath path;
  path.steps = steps;
  path.dt = 1.0 / static_cast<double>(steps);
  path.seed = seed;
  path.stream_id = stream_id;
  const NormalStream stream(seed, stream_id, kBaseLane);
  const double scale = std::sqrt(path.dt);
  path.increments.resize(steps);
  for (std::size_t i = 0; i < steps; ++i) path.increments[i] = scale * stream.normal(i);
  fill_values(path);
  return path;
}

BrownianPath path_from_increments(std::vector<double> increments, std::uint64_t seed,
                                  std::uint64_t stream_id) {
  BrownianPath path;
  path.steps = increments.size();
  if (path.steps < 1) throw std::invalid_argument("path_from_increments: empty path");
  path.dt = 1.0 / static_cast<double>(path.steps);
  path.increments = std::move(increments);
  path.seed = seed;
  path.stream_id = stream_id;
  fill_values(path);
  return path;
}

BrownianPath BrownianPath::refined() const {
  BrownianPath out;
  out.steps = 2 * steps;
  out.dt = dt / 2.0;
  out.seed = seed;
  out.stream_id = stream_id;
  out.level = level + 1;
  const NormalStream stream(seed, stream_id, out.level);
  // Conditional on the endpoints, the midpoint deviates from the chord by
  // Normal(0, dt/4).
  const double sd = std::sqrt(dt) / 2.0;
  out.increments.resize(out.steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double half = 0.5 * increments[i] + sd * stream.normal(i);
    out.increments[2 * i] = half;
    out.increments[2 * i + 1] = increments[i] - half;
  }
  fill_values(out);
  return out;
}

BrownianPath BrownianPath::coarsened(std::size_t factor) const {
  if (factor == 0 || steps % factor != 0) {
    throw std::invalid_argument("coarsened: factor must divide the step count");
  }
  BrownianPath out;
  out.steps = steps / factor;
  out.dt = dt * static_cast<double>(factor);
  out.seed = seed;
  out.stream_id = stream_id;
  out.level = level;
  out.increments.assign(out.steps, 0.0);
  for (std::size_t i = 0; i < steps; ++i) out.increments[i / factor] += increments[i];
  fill_values(out);
  return out;
}

std::size_t coarsening_factor(std::size_t fine, std::size_t required) {
  for (std::size_t f = std::max<std::size_t>(fine / std::max<std::size_t>(required, 1), 1); f > 1; --f) {
    if (fine % f == 0) return f;
  }
  return 1;
}

}  // namespace adiab
