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
#include <vector>

namespace adiab::grid {

/// Uniform grid s_i = i / steps on [0, 1].
inline double step(std::size_t steps) { return 1.0 / static_cast<double>(steps); }
inline double point(std::size_t i, std::size_t steps) {
  return static_cast<double>(i) / static_cast<double>(steps);
}

/// Cumulative integral F_i = int_0^{s_i} f on a uniform grid.
///
/// Even indices are composite Simpson; the first interval uses the
/// three-point rule h/12 (5 f0 + 8 f1 - f2) and odd indices chain Simpson
/// panels from there. Falls back to the trapezoid rule when only two samples
/// exist.
template <class T>
std::vector<T> cumulative_simpson(const std::vector<T>& f, double h) {
  const std::size_t n = f.size();
  std::vector<T> out(n);
  if (n == 0) return out;
  out[0] = f[0] * 0.0;
  if (n == 1) return out;
  if (n == 2) {
    out[1] = (f[0] + f[1]) * (h / 2.0);
    return out;
  }
  out[1] = (f[0] * 5.0 + f[1] * 8.0 - f[2]) * (h / 12.0);
  for (std::size_t i = 2; i < n; ++i) {
    out[i] = out[i - 2] + (f[i - 2] + f[i - 1] * 4.0 + f[i]) * (h / 3.0);
  }
  return out;
}

/// Second-order finite-difference derivative of grid samples: central in
/// the interior, one-sided three-point at the ends.
template <class T>
std::vector<T> derivative(const std::vector<T>& f, double h) {
  const std::size_t n = f.size();
  std::vector<T> out(n);
  if (n < 3) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f[i] * 0.0;
    if (n == 2) out[0] = out[1] = (f[1] - f[0]) / h;
    return out;
  }
  out[0] = (f[0] * -3.0 + f[1] * 4.0 - f[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  out[n - 1] = (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) / (2.0 * h);
  return out;
}

}  // namespace adiab::grid
