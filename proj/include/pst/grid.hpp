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

#include <cstdint>
#include <string>

#include "pst/errors.hpp"
#include "pst/philox.hpp"

namespace pst {

struct GridTime {
  std::uint64_t index = 0;
  double time = 0.0;

  friend bool operator==(const GridTime&, const GridTime&) = default;
};

// Uniform time grid. Times are always index * dt, never accumulated.
class TimeGrid {
 public:
  TimeGrid(double dt, std::uint64_t max_steps) : dt_(dt), max_steps_(max_steps) {
    if (!(dt > 0.0)) throw ConfigError("time grid: dt must be positive");
    if (max_steps < 1) throw ConfigError("time grid: max_steps must be >= 1");
    if (max_steps > kMaxSteps)
      throw ConfigError("time grid: max_steps exceeds " +
                        std::to_string(kMaxSteps));
  }

  double dt() const noexcept { return dt_; }
  std::uint64_t max_steps() const noexcept { return max_steps_; }
  double horizon() const noexcept { return time(max_steps_); }

  double time(std::uint64_t index) const noexcept {
    return static_cast<double>(index) * dt_;
  }
  GridTime at(std::uint64_t index) const noexcept { return {index, time(index)}; }

  // Nearest grid index to a continuous time t >= 0.
  std::uint64_t snap(double t) const noexcept {
    return static_cast<std::uint64_t>(t / dt_ + 0.5);
  }

 private:
  double dt_;
  std::uint64_t max_steps_;
};

}  // namespace pst
