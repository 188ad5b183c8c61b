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
#include <vector>

namespace adiab {

/// Discretized Brownian motion on the uniform grid s_i = i/M of [0, 1].
///
/// increments[i] is B(s_{i+1}) - B(s_i); values[i] is B(s_i) with values[0] = 0.
/// Paths are reproducible from (seed, stream_id); `level` counts Brownian-bridge
/// refinements applied to the base path.
struct BrownianPath {
  std::size_t steps = 0;
  double dt = 0.0;
  std::vector<double> increments;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint32_t level = 0;

  /// Same realization on a grid with twice as many steps; midpoints are
  /// drawn from the Brownian bridge conditional law.
  BrownianPath refined() const;
  /// Same realization on a grid with steps/factor steps (sums increments).
  BrownianPath coarsened(std::size_t factor) const;
};

BrownianPath sample_path(std::size_t steps, std::uint64_t seed, std::uint64_t stream_id);

/// Builds a path from explicit increments (testing and replay).
BrownianPath path_from_increments(std::vector<double> increments, std::uint64_t seed = 0,
                                  std::uint64_t stream_id = 0);

/// Largest divisor f of `fine` with fine / f >= required (1 if none).
std::size_t coarsening_factor(std::size_t fine, std::size_t required);

}  // namespace adiab
