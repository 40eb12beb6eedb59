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

// Azema supermartingales Z_t = P[rho > t | F_t] for the constructions the
// lab simulates, and the scale and tail functions they are built from.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <type_traits>
#include <variant>

#include "pst/errors.hpp"

namespace pst {

// P(|N| >= x) for a standard normal N.
inline double gaussian_tail2(double x) noexcept {
  return std::erfc(x / std::numbers::sqrt2);
}

// Standard normal CDF.
inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// P[T_1 > t] for Brownian motion from 0, i.e. 2 Phi_N(1 / sqrt(t)) - 1.
inline double hitting_survival(double t) noexcept {
  if (t <= 0.0) return 1.0;
  return std::erf(1.0 / std::sqrt(2.0 * t));
}

// Scale function of x + mu t + sigma B_t.
inline double drift_scale(double x, double mu, double sigma) noexcept {
  return std::exp(-2.0 * mu * x / (sigma * sigma));
}

namespace track {

// Z_t = 1 - B+ stopped at T_1.
struct Williams {};

// Z_t = 1 ^ (1 / R_t)^(n - 2).
struct BesselN {
  int dim = 3;
};

// Z_u = Phi(|B_u| / sqrt(t - u)) on [0, t].
struct GHorizon {
  double horizon = 1.0;
};

// Z = 1 ^ s(X) / s(a).
struct DriftedLevel {
  double mu = -1.0;
  double sigma = 1.0;
  double level = 1.0;
};

}  // namespace track

using TrackKind =
    std::variant<track::Williams, track::BesselN, track::GHorizon, track::DriftedLevel>;

// Value of Z given the process value at time u. For the Williams track the
// caller passes the stopped value B_{u ^ T_1}.
inline double track_value(const TrackKind& kind, double value, double u) noexcept {
  const double z = std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, track::Williams>) {
          return 1.0 - std::max(value, 0.0);
        } else if constexpr (std::is_same_v<K, track::BesselN>) {
          if (value <= 1.0) return 1.0;
          return std::pow(1.0 / value, k.dim - 2);
        } else if constexpr (std::is_same_v<K, track::GHorizon>) {
          const double rem = k.horizon - u;
          if (rem <= 0.0) return value == 0.0 ? 1.0 : 0.0;
          return gaussian_tail2(std::abs(value) / std::sqrt(rem));
        } else {
          return drift_scale(value, k.mu, k.sigma) /
                 drift_scale(k.level, k.mu, k.sigma);
        }
      },
      kind);
  return std::clamp(z, 0.0, 1.0);
}

// Streaming track: current value plus running infimum.
class SupermartingaleTrack {
 public:
  explicit SupermartingaleTrack(TrackKind kind) : kind_(kind) {}

  double observe(double value, double u) {
    current_ = track_value(kind_, value, u);
    running_min_ = std::min(running_min_, current_);
    return current_;
  }

  const TrackKind& kind() const noexcept { return kind_; }
  double current() const noexcept { return current_; }
  double running_min() const noexcept { return running_min_; }

 private:
  TrackKind kind_;
  double current_ = 1.0;
  double running_min_ = 1.0;
};

// Non-decreasing clock A_t with a known terminal value.
class AdditiveClock {
 public:
  explicit AdditiveClock(double a_infty_target = 1.0) : target_(a_infty_target) {}

  void observe(double a) {
    if (a < a_t_) throw std::logic_error("additive clock decreased");
    a_t_ = std::min(a, target_);
  }

  double a_t() const noexcept { return a_t_; }
  double target() const noexcept { return target_; }

 private:
  double target_;
  double a_t_ = 0.0;
};

}  // namespace pst
