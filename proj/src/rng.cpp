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

#include "adiab/rng.hpp"

#include <cmath>
#include <numbers>

namespace adiab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit mantissa from two words, shifted off zero.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream_id, std::uint32_t lane)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream_id),
      lane_(lane) {}

std::array<double, 2> NormalStream::uniform_pair(std::uint64_t block) const {
  // Counter layout: word 0-1 block index (block < 2^48), lane in the top 16
  // bits of word 1, stream id in words 2-3.
  const Philox4x32::Counter ctr{
      static_cast<std::uint32_t>(block),
      static_cast<std::uint32_t>((block >> 32) & 0xFFFFu) | (lane_ << 16),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const auto out = Philox4x32::generate(ctr, key_);
  return {to_open_unit(out[0], out[1]), to_open_unit(out[2], out[3])};
}

double NormalStream::normal(std::uint64_t index) const {
  const auto u = uniform_pair(index >> 1);
  const double radius = std::sqrt(-2.0 * std::log(u[0]));
  const double angle = 2.0 * std::numbers::pi * u[1];
  return (index & 1u) ? radius * std::sin(angle) : radius * std::cos(angle);
}

double NormalStream::uniform(std::uint64_t index) const {
  const auto u = uniform_pair(index >> 1);
  return u[index & 1u];
}

}  // namespace adiab
