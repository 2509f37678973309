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

#include "affine_minimax/rng.hpp"

namespace affine_minimax {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline Philox::Block round(const Philox::Block& c, const Philox::Key& k) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mulhilo(kMul0, c[0], lo0, hi0);
  mulhilo(kMul1, c[2], lo1, hi1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Philox::Philox(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0, substream, static_cast<std::uint32_t>(stream),
               static_cast<std::uint32_t>(stream >> 32)} {}

Philox::Block Philox::encrypt(Block counter, Key key) {
  counter = round(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    counter = round(counter, key);
  }
  return counter;
}

void Philox::refill() {
  buffer_ = encrypt(counter_, key_);
  ++counter_[0];
  next_ = 0;
}

Philox::result_type Philox::operator()() {
  if (next_ == 4) refill();
  return buffer_[next_++];
}

double Philox::uniform() {
  const std::uint64_t hi = (*this)() >> 5;  // 27 bits
  const std::uint64_t lo = (*this)() >> 6;  // 26 bits
  const double u = (static_cast<double>(hi) * 67108864.0 + static_cast<double>(lo)) *
                   (1.0 / 9007199254740992.0);
  // shift off zero; the largest value stays strictly below 1
  return u + 0.5 / 9007199254740992.0;
}

}  // namespace affine_minimax
