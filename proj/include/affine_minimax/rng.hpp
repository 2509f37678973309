// Copyright 2026 The affine_minimax Authors
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
#include <limits>

namespace affine_minimax {

/// Counter-based Philox4x32-10 generator.
///
/// A stream is addressed by (seed, stream, substream): the seed is the key,
/// and the 128-bit counter is laid out as [block, substream, stream_lo,
/// stream_hi]. Monte Carlo replication i of point j therefore draws from
/// Philox(seed, j, i) regardless of which thread runs it or in which order.
/// Satisfies UniformRandomBitGenerator, so std:: distributions work on it.
class Philox {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0, std::uint32_t substream = 0);

  /// The bare bijection: ten rounds of Philox4x32 on one counter block.
  static Block encrypt(Block counter, Key key);

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform double in the open interval (0, 1) with 53 random bits.
  double uniform();

 private:
  void refill();

  Key key_;
  Block counter_;
  Block buffer_{};
  int next_ = 4;
};

}  // namespace affine_minimax
