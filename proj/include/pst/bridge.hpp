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

// Brownian-bridge monitoring between grid points.
//
// Given the endpoints of one step, the path in between is a Brownian bridge
// (for Bessel paths, approximately so). Level crossings and running extrema
// inside the step are sampled from their exact bridge laws, which removes the
// O(sqrt(dt)) bias of reading extrema off grid values alone. A step in which
// two different boundaries are within reach is bisected by sampling the
// bridge midpoint, so that the order of events inside a step is resolved.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "pst/philox.hpp"

namespace pst {

// Crossing probabilities below exp(-2 * kFarExponent) are treated as zero.
inline constexpr double kFarExponent = 20.0;

// Depth cap for bisection; leaves have variance var / 2^depth.
inline constexpr int kMaxRefineDepth = 10;

struct Segment {
  std::uint64_t step = 0;  // grid index at the end of the enclosing step
  double t0 = 0.0;
  double t1 = 0.0;
  double x0 = 0.0;
  double x1 = 0.0;
  double var = 0.0;  // diffusion variance accumulated over the segment
  std::uint32_t node = 1;
  int depth = 0;
};

// Could a bridge whose endpoints sit at signed distances d0, d1 from a
// boundary reach it with non-negligible probability?
inline bool may_cross(double d0, double d1, double var) noexcept {
  if (d0 * d1 <= 0.0) return true;
  return var > 0.0 && d0 * d1 < kFarExponent * var;
}

// Probability that the bridge touches the boundary.
inline double crossing_probability(double d0, double d1, double var) noexcept {
  if (d0 * d1 <= 0.0) return 1.0;
  if (var <= 0.0) return 0.0;
  return std::exp(-2.0 * d0 * d1 / var);
}

inline double bridge_max(double x0, double x1, double var, double u) noexcept {
  const double d = x1 - x0;
  return 0.5 * (x0 + x1 + std::sqrt(d * d - 2.0 * var * std::log(u)));
}

inline double bridge_min(double x0, double x1, double var, double u) noexcept {
  const double d = x1 - x0;
  return 0.5 * (x0 + x1 - std::sqrt(d * d - 2.0 * var * std::log(u)));
}

// Lazily evaluated uniforms attached to one segment (step, node). Slot 0
// drives the upper extremum, slot 1 the lower extremum, slots 2 and 3 extra
// boundaries. Without a stream every uniform is 1, which reduces bridge
// monitoring to plain grid monitoring.
class SegmentDraws {
 public:
  SegmentDraws() = default;
  SegmentDraws(const CounterStream* stream, std::uint64_t step,
               std::uint32_t node)
      : stream_(stream), step_(step), node_(node) {}

  bool active() const noexcept { return stream_ != nullptr; }

  double u(int slot) {
    if (!stream_) return 1.0;
    const int pair = slot / 2;
    if (!have_[pair]) {
      draws_[pair] = stream_->uniforms(step_, lane_for(pair));
      have_[pair] = true;
    }
    return draws_[pair][slot % 2];
  }

  // Standard normal for the bisection midpoint of this segment.
  double midpoint_normal() const {
    const auto uv = stream_->uniforms(step_, lane_for(2));
    return std::sqrt(-2.0 * std::log(uv[0])) *
           std::cos(2.0 * std::numbers::pi * uv[1]);
  }

  SegmentDraws child(int which) const {
    return {stream_, step_, node_ * 2 + static_cast<std::uint32_t>(which)};
  }

 private:
  std::uint32_t lane_for(int pair) const noexcept {
    return 16u + 4u * node_ + static_cast<std::uint32_t>(pair);
  }

  const CounterStream* stream_ = nullptr;
  std::uint64_t step_ = 0;
  std::uint32_t node_ = 1;
  std::array<std::array<double, 2>, 2> draws_{};
  std::array<bool, 2> have_{false, false};
};

// Split a segment at its time midpoint using an exact bridge sample.
inline std::array<Segment, 2> bisect(const Segment& s, double z) noexcept {
  const double tm = 0.5 * (s.t0 + s.t1);
  const double xm = 0.5 * (s.x0 + s.x1) + 0.5 * std::sqrt(s.var) * z;
  Segment a = s;
  Segment b = s;
  a.t1 = tm;
  a.x1 = xm;
  b.t0 = tm;
  b.x0 = xm;
  a.var = b.var = 0.5 * s.var;
  a.node = s.node * 2;
  b.node = s.node * 2 + 1;
  a.depth = b.depth = s.depth + 1;
  return {a, b};
}

// Upper-extremum sample for a segment, skipped when `level` is out of reach.
// Returns max(x0, x1) when no sampling is needed.
inline double segment_max(const Segment& s, SegmentDraws& draws, double level) {
  const double hi = std::max(s.x0, s.x1);
  if (!draws.active() || !may_cross(level - s.x0, level - s.x1, s.var))
    return hi;
  return std::max(hi, bridge_max(s.x0, s.x1, s.var, draws.u(0)));
}

inline double segment_min(const Segment& s, SegmentDraws& draws, double level) {
  const double lo = std::min(s.x0, s.x1);
  if (!draws.active() || !may_cross(s.x0 - level, s.x1 - level, s.var))
    return lo;
  return std::min(lo, bridge_min(s.x0, s.x1, s.var, draws.u(1)));
}

// Does the segment touch the (locally linear) boundary whose signed distance
// from the path is d0 at t0 and d1 at t1?
inline bool segment_crosses(const Segment& s, SegmentDraws& draws, double d0,
                            double d1, int slot) {
  if (d0 * d1 <= 0.0) return true;
  if (!draws.active() || !may_cross(d0, d1, s.var)) return false;
  return draws.u(slot) < crossing_probability(d0, d1, s.var);
}

}  // namespace pst
