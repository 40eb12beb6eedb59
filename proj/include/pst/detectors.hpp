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

// Random-time detectors over recorded grid sequences, plus the streaming
// last-passage monitor used for transient processes.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "pst/bridge.hpp"
#include "pst/errors.hpp"
#include "pst/grid.hpp"
#include "pst/pathgen.hpp"
#include "pst/supermartingale.hpp"

namespace pst {

struct TimeDetection {
  GridTime rho;
  std::map<std::string, double> marks;
  bool truncated = false;

  std::optional<double> mark(const std::string& name) const {
    auto it = marks.find(name);
    if (it == marks.end()) return std::nullopt;
    return it->second;
  }
};

struct ZeroMaxResult {
  std::optional<GridTime> sigma;
  GridTime rho;
  double s_rho = 0.0;
};

// Single pass over values[0 .. stop): last value <= 0 is the sigma candidate,
// and at each such index the current argmax of the running maximum is frozen
// as the rho candidate.
inline ZeroMaxResult zero_and_max_tracker(std::span<const double> values,
                                          GridTime stop, const TimeGrid& grid) {
  ZeroMaxResult out;
  if (values.empty()) return out;
  double s = values[0];
  std::uint64_t arg = 0;
  const std::uint64_t end = std::min<std::uint64_t>(stop.index, values.size());
  for (std::uint64_t k = 0; k < end; ++k) {
    if (values[k] >= s) {
      s = values[k];
      arg = k;
    }
    if (values[k] <= 0.0) {
      out.sigma = grid.at(k);
      out.rho = grid.at(arg);
      out.s_rho = s;
    }
  }
  return out;
}

// Last index before l_idx at which Z sits at its running minimum.
inline TimeDetection detect_inf_rho(std::span<const double> z, GridTime l_idx,
                                    const TimeGrid& grid) {
  TimeDetection d;
  double zmin = 1.0;
  std::uint64_t arg = 0;
  const std::uint64_t end = std::min<std::uint64_t>(l_idx.index, z.size());
  for (std::uint64_t k = 0; k < end; ++k) {
    if (z[k] <= zmin) {
      zmin = z[k];
      arg = k;
    }
  }
  d.rho = grid.at(arg);
  d.marks["z_rho"] = zmin;
  d.marks["l_time"] = l_idx.time;
  return d;
}

inline void validate_delta(std::span<const double> delta) {
  if (delta.empty() || delta[0] != 1.0)
    throw InvalidDelta("delta must start at 1");
  for (std::size_t k = 1; k < delta.size(); ++k)
    if (delta[k] > delta[k - 1]) throw InvalidDelta("delta must be non-increasing");
}

// Last index before l_idx where Z - Delta is zero or has just changed sign.
inline TimeDetection detect_delta_rho(std::span<const double> z,
                                      std::span<const double> delta,
                                      GridTime l_idx, const TimeGrid& grid) {
  validate_delta(delta);
  TimeDetection d;
  const std::uint64_t end =
      std::min<std::uint64_t>({l_idx.index, z.size(), delta.size()});
  std::uint64_t last = 0;
  double prev = 0.0;
  for (std::uint64_t k = 0; k < end; ++k) {
    const double g = z[k] - delta[k];
    if (g == 0.0 || (k > 0 && prev * g < 0.0)) last = k;
    prev = g;
  }
  d.rho = grid.at(last);
  if (last < delta.size()) d.marks["delta"] = delta[last];
  d.marks["l_time"] = l_idx.time;
  return d;
}

// First index at which the clock exceeds `theta`. Absent when the recorded
// clock never does (ClockIncomplete; counted by callers).
inline std::optional<GridTime> alpha_inverse(std::span<const double> a,
                                             double theta, const TimeGrid& grid) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] > theta) return grid.at(k);
  return std::nullopt;
}

inline TimeDetection cox_time(std::span<const double> a, double theta,
                              const TimeGrid& grid) {
  TimeDetection d;
  if (auto hit = alpha_inverse(a, theta, grid)) {
    d.rho = *hit;
  } else {
    d.rho = grid.at(a.empty() ? 0 : a.size() - 1);
    d.truncated = true;
  }
  d.marks["theta"] = theta;
  return d;
}

// rho = 1 / (1 + |B_2 - B_1|), snapped to the grid.
inline TimeDetection silly_time(double b1, double b2, const TimeGrid& grid) {
  TimeDetection d;
  const double t = 1.0 / (1.0 + std::abs(b2 - b1));
  d.rho = grid.at(grid.snap(t));
  d.marks["raw_time"] = t;
  return d;
}

// Probability that a transient process currently at `value` ever returns
// to `level`.
struct ReturnProbability {
  ProcessKind process;

  double operator()(double value, double level) const {
    if (const auto* b = std::get_if<Bessel>(&process)) {
      if (value <= level) return 1.0;
      return std::pow(level / value, b->dim - 2);
    }
    if (const auto* d = std::get_if<Drifted>(&process)) {
      if (value >= level) return 1.0;
      return drift_scale(value, d->mu, d->sigma) / drift_scale(level, d->mu, d->sigma);
    }
    return 1.0;
  }
};

inline void require_transient(const ProcessKind& kind) {
  if (const auto* b = std::get_if<Bessel>(&kind)) {
    if (b->dim >= 3) return;
  } else if (const auto* d = std::get_if<Drifted>(&kind)) {
    if (d->mu < 0.0) return;
  }
  throw NotTransient("last passage: process is recurrent at this level");
}

// Streaming last-passage detector with return-probability pruning.
class LastPassageMonitor {
 public:
  LastPassageMonitor(const ProcessKind& kind, double level, double prune_eps)
      : ret_{kind}, level_(level), eps_(prune_eps) {
    require_transient(kind);
    if (!(prune_eps > 0.0 && prune_eps < 1.0))
      throw ConfigError("prune_eps must lie in (0, 1)");
  }

  // Record a crossing inside the segment; returns true once the stream can
  // stop because a return is no more likely than prune_eps.
  bool observe(const Segment& s, SegmentDraws& draws) {
    if (segment_crosses(s, draws, level_ - s.x0, level_ - s.x1, 0)) {
      last_ = s.t1;
      last_index_ = s.step;
      seen_ = true;
    }
    return done(s.x1);
  }

  bool done(double value) const { return ret_(value, level_) <= eps_; }
  double miss_probability() const noexcept { return eps_; }
  bool seen() const noexcept { return seen_; }
  double last_time() const noexcept { return last_; }
  std::uint64_t last_index() const noexcept { return last_index_; }

 private:
  ReturnProbability ret_;
  double level_;
  double eps_;
  bool seen_ = false;
  double last_ = 0.0;
  std::uint64_t last_index_ = 0;
};

// Ratio (1 - S_t) / (1 - B+_t) evaluated along a Williams path; reports the
// first time it rises at least `rel` above its running minimum.
class EnlargedRatioMonitor {
 public:
  explicit EnlargedRatioMonitor(double rel = 0.01) : rel_(rel) {}

  static double ratio(double b, double s) noexcept {
    return (1.0 - s) / (1.0 - std::max(b, 0.0));
  }

  void observe(double b, double s, double t) {
    if (witness_) return;
    const double r = ratio(b, s);
    if (r > min_ * (1.0 + rel_)) {
      witness_ = t;
      return;
    }
    min_ = std::min(min_, r);
  }

  std::optional<double> witness() const noexcept { return witness_; }

 private:
  double rel_;
  double min_ = 1.0;
  std::optional<double> witness_;
};

}  // namespace pst
