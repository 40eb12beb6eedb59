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

// Closed-form test martingales. Callers pass the already-stopped state, so
// evaluation is a pure function of (value, time, stopped flag).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include "pst/supermartingale.hpp"

namespace pst {

namespace mart {

// exp(lambda B_{t^T1} - lambda^2 (t^T1) / 2)
struct ExpStopped {
  double lambda = 1.0;
};

// exp(lambda B_t - lambda^2 t / 2) on [0, horizon]
struct ExpHorizon {
  double lambda = 1.0;
  double horizon = 1.0;
};

// (c / R_{t^T_c})^(n - 2)
struct HitprobBessel {
  double c = 0.2;
  int dim = 3;
};

// 1 ^ s(X_{t^T_a}) / s(a)
struct HitprobDrifted {
  double level = 0.5;
  double mu = -1.0;
  double sigma = 1.0;
};

// B_{t^T1}; not in H^1
struct LinearStopped {};

}  // namespace mart

using MartingaleKind = std::variant<mart::ExpStopped, mart::ExpHorizon, mart::HitprobBessel,
                                    mart::HitprobDrifted, mart::LinearStopped>;

struct MartingaleSpec {
  MartingaleKind kind;

  // Uniform bound on |M|, or nullopt when unbounded.
  std::optional<double> bound() const {
    return std::visit(
        [](const auto& k) -> std::optional<double> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, mart::ExpStopped>) return std::exp(k.lambda);
          else if constexpr (std::is_same_v<K, mart::ExpHorizon>) return std::nullopt;
          else if constexpr (std::is_same_v<K, mart::LinearStopped>) return std::nullopt;
          else return 1.0;
        },
        kind);
  }

  bool is_h1() const noexcept { return !std::holds_alternative<mart::LinearStopped>(kind); }

  // Value at state `x` and time `t`; `stopped` says the stopping level was
  // reached at or before t (for the Brownian kinds the caller passes the
  // stopped value and time instead).
  double value(double x, double t, bool stopped = false) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, mart::ExpStopped> ||
                        std::is_same_v<K, mart::ExpHorizon>) {
            return std::exp(k.lambda * x - 0.5 * k.lambda * k.lambda * t);
          } else if constexpr (std::is_same_v<K, mart::HitprobBessel>) {
            if (stopped || x <= k.c) return 1.0;
            return std::pow(k.c / x, k.dim - 2);
          } else if constexpr (std::is_same_v<K, mart::HitprobDrifted>) {
            if (stopped || x >= k.level) return 1.0;
            return std::min(1.0, drift_scale(x, k.mu, k.sigma) /
                                     drift_scale(k.level, k.mu, k.sigma));
          } else {
            return x;
          }
        },
        kind);
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, mart::ExpStopped>) return "exp_stopped";
          else if constexpr (std::is_same_v<K, mart::ExpHorizon>) return "exp_horizon";
          else if constexpr (std::is_same_v<K, mart::HitprobBessel>) return "hitprob_bessel";
          else if constexpr (std::is_same_v<K, mart::HitprobDrifted>) return "hitprob_drifted";
          else return "linear_stopped";
        },
        kind);
  }
};

inline double exp_martingale(double lambda, double b, double t) noexcept {
  return std::exp(lambda * b - 0.5 * lambda * lambda * t);
}

}  // namespace pst
