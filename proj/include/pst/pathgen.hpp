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

// Sampled trajectories of Brownian motion, integer-dimension Bessel
// processes and drifted Brownian motion on a uniform grid.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <variant>

#include "pst/bridge.hpp"
#include "pst/errors.hpp"
#include "pst/grid.hpp"
#include "pst/philox.hpp"

namespace pst {

struct Brownian {};

struct Bessel {
  int dim = 3;
  double r0 = 0.0;
};

struct Drifted {
  double x0 = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
};

using ProcessKind = std::variant<Brownian, Bessel, Drifted>;

inline void validate(const ProcessKind& kind) {
  if (const auto* b = std::get_if<Bessel>(&kind)) {
    if (b->dim < 3 || b->dim > 9)
      throw ConfigError("bessel: integer dimension must lie in [3, 9]");
    if (!(b->r0 >= 0.0)) throw ConfigError("bessel: r0 must be >= 0");
  } else if (const auto* d = std::get_if<Drifted>(&kind)) {
    if (!(d->sigma > 0.0)) throw ConfigError("drifted: sigma must be positive");
  }
}

inline double start_value(const ProcessKind& kind) noexcept {
  return std::visit(
      [](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Bessel>) return k.r0;
        else if constexpr (std::is_same_v<K, Drifted>) return k.x0;
        else return 0.0;
      },
      kind);
}

// Variance of the martingale part over one step of length dt.
inline double step_variance(const ProcessKind& kind, double dt) noexcept {
  if (const auto* d = std::get_if<Drifted>(&kind)) return d->sigma * d->sigma * dt;
  return dt;
}

// One step's worth of randomness. For BES(n) the coordinate frame is rotated
// so the current position lies on the first axis: the radial coordinate takes
// the Gaussian increment and the n-1 transverse coordinates contribute
// dt * chi_square(n-1). This is the norm of n independent Brownian motions,
// exact in law at grid times.
struct Increment {
  double gaussian = 0.0;
  double transverse_chi2 = 0.0;
};

inline Increment draw_increment(const ProcessKind& kind, CounterStream& rs,
                                std::uint64_t step) {
  Increment inc{rs.normal(step), 0.0};
  if (const auto* b = std::get_if<Bessel>(&kind)) {
    const int k = b->dim - 1;
    for (int j = 0; j < k / 2; ++j) {
      const double u = rs.uniforms(step, lane::kExtra + j / 2)[j % 2];
      inc.transverse_chi2 += -2.0 * std::log(u);
    }
    if (k % 2 == 1) {
      const auto uv = rs.uniforms(step, lane::kExtra + 4);
      const double g = std::sqrt(-2.0 * std::log(uv[0])) *
                       std::cos(2.0 * std::numbers::pi * uv[1]);
      inc.transverse_chi2 += g * g;
    }
  }
  return inc;
}

inline double apply_increment(const ProcessKind& kind, double value, double dt,
                              const Increment& inc) noexcept {
  const double sq = std::sqrt(dt);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Bessel>) {
          const double radial = value + sq * inc.gaussian;
          return std::sqrt(radial * radial + dt * inc.transverse_chi2);
        } else if constexpr (std::is_same_v<K, Drifted>) {
          return value + k.mu * dt + k.sigma * sq * inc.gaussian;
        } else {
          return value + sq * inc.gaussian;
        }
      },
      kind);
}

struct PathCursor {
  ProcessKind process = Brownian{};
  std::uint64_t step_index = 0;
  double value = 0.0;
  double running_max = 0.0;
  std::optional<std::uint64_t> last_nonpositive_index;
  std::uint64_t last_max_attain_index = 0;
  bool truncated = false;
};

inline PathCursor make_cursor(const ProcessKind& kind) {
  validate(kind);
  PathCursor c;
  c.process = kind;
  c.value = start_value(kind);
  c.running_max = c.value;
  if (c.value <= 0.0) c.last_nonpositive_index = 0;
  return c;
}

// Advance by one grid step with an explicit increment.
inline PathCursor advance_with(PathCursor c, const TimeGrid& grid,
                               const Increment& inc) {
  if (c.truncated || c.step_index >= grid.max_steps())
    throw std::logic_error("advance: cursor is truncated");
  c.value = apply_increment(c.process, c.value, grid.dt(), inc);
  ++c.step_index;
  if (c.value >= c.running_max) {
    c.running_max = c.value;
    c.last_max_attain_index = c.step_index;
  }
  if (c.value <= 0.0) c.last_nonpositive_index = c.step_index;
  if (c.step_index >= grid.max_steps()) c.truncated = true;
  return c;
}

inline PathCursor advance(PathCursor c, const TimeGrid& grid, CounterStream& rs) {
  const Increment inc = draw_increment(c.process, rs, c.step_index + 1);
  return advance_with(std::move(c), grid, inc);
}

inline PathCursor advance(PathCursor c, const TimeGrid& grid, StreamKey key) {
  CounterStream rs(key);
  return advance(std::move(c), grid, rs);
}

enum class Direction { up, down };

struct HitResult {
  std::optional<GridTime> time;
  bool truncated = false;
};

// First grid time at which a recorded value sequence reaches `level`.
inline HitResult first_hit(std::span<const double> values, double level,
                           Direction dir, const TimeGrid& grid) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    const bool hit = dir == Direction::up ? values[k] >= level : values[k] <= level;
    if (hit) return {grid.at(k), false};
  }
  return {std::nullopt, true};
}

// Streaming first passage. With bridge monitoring a crossing between grid
// points is credited to the end of its step.
class FirstHitMonitor {
 public:
  FirstHitMonitor(double level, Direction dir) : level_(level), dir_(dir) {}

  bool observe(const Segment& s, SegmentDraws& draws) {
    if (hit_) return true;
    if (dir_ == Direction::up) {
      hit_ = segment_max(s, draws, level_) >= level_;
    } else {
      hit_ = segment_min(s, draws, level_) <= level_;
    }
    if (hit_) index_ = s.step;
    return hit_;
  }

  bool hit() const noexcept { return hit_; }
  std::uint64_t index() const noexcept { return index_; }

 private:
  double level_;
  Direction dir_;
  bool hit_ = false;
  std::uint64_t index_ = 0;
};

// Drive a cursor until `level` is reached or the grid is exhausted.
inline HitResult first_hit(PathCursor& c, const TimeGrid& grid,
                           CounterStream& rs, double level, Direction dir,
                           bool bridge = true) {
  FirstHitMonitor mon(level, dir);
  const bool at_start = dir == Direction::up ? c.value >= level : c.value <= level;
  if (at_start) return {grid.at(c.step_index), false};
  const double var = step_variance(c.process, grid.dt());
  while (!c.truncated) {
    const double from = c.value;
    c = advance(std::move(c), grid, rs);
    Segment s{c.step_index, grid.time(c.step_index - 1), grid.time(c.step_index),
              from, c.value, var};
    SegmentDraws draws = bridge ? SegmentDraws(&rs, c.step_index, 1) : SegmentDraws();
    if (mon.observe(s, draws)) return {grid.at(c.step_index), false};
  }
  return {std::nullopt, true};
}

}  // namespace pst
