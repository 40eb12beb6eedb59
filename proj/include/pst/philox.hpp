/*
   Copyright 2026 The pseudostop Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Counter-based random numbers keyed by (seed, path, step). Every draw is a
// pure function of its coordinates, so results do not depend on how paths
// are partitioned across workers.

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace pst {

// Salmon et al., "Parallel random numbers: as easy as 1, 2, 3" (SC11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

  // N independent blocks with the rounds interleaved, which lets the
  // multiplies overlap. Results equal N calls to apply().
  template <std::size_t N>
  static constexpr std::array<Counter, N> apply_n(std::array<Counter, N> ctr,
                                                  Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      for (std::size_t i = 0; i < N; ++i) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[i][0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[i][2];
        ctr[i] = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[i][1] ^ key[0],
                  static_cast<std::uint32_t>(p1),
                  static_cast<std::uint32_t>(p0 >> 32) ^ ctr[i][3] ^ key[1],
                  static_cast<std::uint32_t>(p0)};
      }
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

// Lane assignments inside one step cell. Step index kAuxStep is reserved for
// per-path auxiliary variables (independent uniforms such as a Cox threshold).
// Lanes 16 and up belong to bridge segments (see bridge.hpp).
namespace lane {
inline constexpr std::uint32_t kNormal = 0;
inline constexpr std::uint32_t kExtra = 3;     // Bessel transverse draws, 3..7
inline constexpr std::uint32_t kOverflow = 8;  // ziggurat rejections, 8..15
}  // namespace lane

inline constexpr std::uint64_t kAuxStep = 0xFFFFFFFFull;
// Step indices above this are reserved for auxiliary cells.
inline constexpr std::uint64_t kMaxSteps = 0xFFFF0000ull;

class CounterStream {
 public:
  using Block = Philox4x32::Counter;

  explicit CounterStream(StreamKey key) noexcept
      : key_{static_cast<std::uint32_t>(key.seed),
             static_cast<std::uint32_t>(key.seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(key.path_index)),
        path_hi_(static_cast<std::uint32_t>(key.path_index >> 32)) {}

  Block block(std::uint64_t step, std::uint32_t lane) const noexcept {
    return Philox4x32::apply(
        {static_cast<std::uint32_t>(step), lane, path_lo_, path_hi_}, key_);
  }

  static std::uint64_t word(const Block& b, int i) noexcept {
    return (std::uint64_t{b[2 * i]} << 32) | b[2 * i + 1];
  }

  // Uniform on the open interval (0, 1) with 52 random bits; the largest
  // value is 1 - 2^-53, which is representable.
  static double to_open_unit(std::uint64_t w) noexcept {
    return (static_cast<double>(w >> 12) + 0.5) * 0x1.0p-52;
  }

  // Two independent open-interval uniforms for (step, lane).
  std::array<double, 2> uniforms(std::uint64_t step,
                                 std::uint32_t lane) const noexcept {
    const Block b = block(step, lane);
    return {to_open_unit(word(b, 0)), to_open_unit(word(b, 1))};
  }

  double aux_uniform(std::uint32_t slot) const noexcept {
    return uniforms(kAuxStep, slot / 2)[slot % 2];
  }

  // Standard normal for `step`. Two consecutive steps share one Philox block
  // on the normal lane; the ziggurat's rare rejections draw from overflow
  // lanes of the same step. Blocks are generated kBatch at a time.
  double normal(std::uint64_t step) noexcept {
    const std::uint64_t group = step / (2 * kBatch);
    if (group != cached_group_) refill(group);
    const std::uint64_t pair = step >> 1;
    CellEngine eng{this, step,
                   word(cached_[pair % kBatch], static_cast<int>(step & 1))};
    return unit_normal_(eng);
  }

  double aux_normal(std::uint32_t slot) const noexcept {
    CellEngine eng{this, kAuxStep - 1 - slot,
                   word(block(kAuxStep, 64 + slot), 0)};
    boost::random::normal_distribution<double> unit;
    return unit(eng);
  }

 private:
  struct CellEngine {
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
      return std::numeric_limits<result_type>::max();
    }
    result_type operator()() {
      if (calls_ == 0) {
        ++calls_;
        return first_;
      }
      const std::uint32_t idx = calls_ - 1;
      ++calls_;
      const Block b = owner_->block(step_, lane::kOverflow + idx / 2);
      return word(b, static_cast<int>(idx % 2));
    }

    CellEngine(const CounterStream* owner, std::uint64_t step,
               std::uint64_t first)
        : owner_(owner), step_(step), first_(first) {}

   private:
    const CounterStream* owner_;
    std::uint64_t step_;
    std::uint64_t first_;
    std::uint32_t calls_ = 0;
  };

  static constexpr std::size_t kBatch = 4;

  void refill(std::uint64_t group) noexcept {
    std::array<Block, kBatch> ctr;
    for (std::size_t i = 0; i < kBatch; ++i)
      ctr[i] = {static_cast<std::uint32_t>(group * kBatch + i), lane::kNormal,
                path_lo_, path_hi_};
    cached_ = Philox4x32::apply_n(ctr, key_);
    cached_group_ = group;
  }

  Philox4x32::Key key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
  std::uint64_t cached_group_ = std::numeric_limits<std::uint64_t>::max();
  std::array<Block, kBatch> cached_{};
  boost::random::normal_distribution<double> unit_normal_{};
};

}  // namespace pst
