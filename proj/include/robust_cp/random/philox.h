//
// Copyright 2026 The robust_cp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Philox4x64-10 counter-based generator (Salmon et al., SC'11). A stream is
// identified by (seed, stream_a, stream_b); the two stream words occupy the
// upper counter lanes, so streams never overlap and can be created in any
// order without shared state.

#ifndef ROBUST_CP_RANDOM_PHILOX_H_
#define ROBUST_CP_RANDOM_PHILOX_H_

#include <array>
#include <cstdint>
#include <limits>

namespace robust_cp {

class Philox4x64 {
 public:
  using result_type = uint64_t;
  using Block = std::array<uint64_t, 4>;
  using Key = std::array<uint64_t, 2>;

  Philox4x64(uint64_t seed, uint64_t stream_a, uint64_t stream_b)
      : key_{seed, kKeyDomain}, counter_{0, stream_a, stream_b, 0} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (index_ == 4) {
      buffer_ = Generate(counter_, key_);
      ++counter_[0];
      index_ = 0;
    }
    return buffer_[index_++];
  }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // The raw 10-round block function.
  static Block Generate(Block counter, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      uint64_t hi0, lo0, hi1, lo1;
      MulHiLo(kMul0, counter[0], hi0, lo0);
      MulHiLo(kMul1, counter[2], hi1, lo1);
      counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1],
                 lo0};
    }
    return counter;
  }

 private:
  static constexpr uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
  static constexpr uint64_t kKeyDomain = 0x726f627573745f63ULL;

  static void MulHiLo(uint64_t a, uint64_t b, uint64_t& hi, uint64_t& lo) {
    const unsigned __int128 product =
        static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
    hi = static_cast<uint64_t>(product >> 64);
    lo = static_cast<uint64_t>(product);
  }

  Key key_;
  Block counter_;
  Block buffer_{};
  int index_ = 4;
};

using RngStream = Philox4x64;

// Derives a substream seed for a named purpose (e.g. the trial index) so
// that unrelated consumers of one master seed do not collide.
inline uint64_t DeriveSeed(uint64_t seed, uint64_t purpose, uint64_t index) {
  const Philox4x64::Block block =
      Philox4x64::Generate({index, purpose, 0, 0}, {seed, 0x64657269766564ULL});
  return block[0];
}

}  // namespace robust_cp

#endif  // ROBUST_CP_RANDOM_PHILOX_H_
