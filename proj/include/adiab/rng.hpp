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

#include <array>
#include <cstdint>

namespace adiab {

/// Philox4x32-10 counter-based generator.
///
/// Every output block is a pure function of (key, counter), so independent
/// streams need no shared state: the stream id and draw index are packed into
/// the counter and the user seed into the key.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Normal(0, 1) variates addressed by (seed, stream, lane, index).
///
/// `lane` separates independent uses of one stream (base path increments,
/// each Brownian-bridge refinement level, synthetic calibration data).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream_id, std::uint32_t lane = 0);

  /// The index-th standard normal of this stream (Box-Muller on one block
  /// yields two variates; even and odd indices share a block).
  double normal(std::uint64_t index) const;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t index) const;

 private:
  std::array<double, 2> uniform_pair(std::uint64_t block) const;

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint32_t lane_;
};

}  // namespace adiab
