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

// Path engines for the generalized constructions: BES(n) and drifted
// Brownian motion observed up to a last passage, the last zero before a
// fixed horizon, and the time built from increments after time 1.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "pst/bridge.hpp"
#include "pst/detectors.hpp"
#include "pst/errors.hpp"
#include "pst/grid.hpp"
#include "pst/pathgen.hpp"
#include "pst/philox.hpp"
#include "pst/supermartingale.hpp"

namespace pst {

inline constexpr double kUnknownTime = std::numeric_limits<double>::quiet_NaN();

// Lane for the per-step uniforms of an exact continuation.
inline constexpr std::uint32_t kJumpLane = lane::kExtra + 2;

// ---------------------------------------------------------------------------
// BES(n) from r0: L is the last passage at `level`, rho the last time before
// L at which R sits at its running maximum over [0, L].

struct BesselConfig {
  int dim = 3;
  double r0 = 1.0;
  double c = 0.2;  // level of the hitting-probability martingale
  double level = 1.0;
  double prune_eps = 0.25;
  // Once a return is no more likely than prune_eps, decide it exactly: with
  // probability (level / r)^(n-2) the path comes back, after an excursion
  // whose maximum is drawn from its conditional law.
  bool continuation = true;
  bool bridge = true;
  int max_depth = kMaxRefineDepth;
};

struct BesselRecord {
  double max_r = 0.0;         // sup R over [0, L]
  bool tc_before_rho = false;  // T_c precedes rho
  bool tc_before_l = false;    // T_c precedes L
  double rho_time = 0.0;       // NaN once a continuation precedes it
  double l_time = 0.0;
  bool truncated = false;
  bool pruned = false;  // stopped with a miss probability <= prune_eps
  int jumps = 0;
  std::uint64_t steps = 0;
};

// P[max >= m | return] inverted at u for an excursion from r above `level`.
inline double bessel_excursion_max(int dim, double level, double r, double u) {
  const double a = dim - 2.0;
  const double pr = std::pow(level / r, a);
  const double pm = u * pr / (1.0 - (1.0 - u) * pr);
  return level * std::pow(pm, -1.0 / a);
}

class BesselEngine {
 public:
  BesselEngine(BesselConfig cfg, TimeGrid grid) : cfg_(cfg), grid_(grid) {
    const ProcessKind kind = Bessel{cfg_.dim, cfg_.r0};
    validate(kind);
    require_transient(kind);
    if (!(cfg_.prune_eps > 0.0 && cfg_.prune_eps < 1.0))
      throw ConfigError("bessel: prune_eps must lie in (0, 1)");
    if (!(cfg_.c > 0.0 && cfg_.c < cfg_.level))
      throw ConfigError("bessel: need 0 < c < level");
  }

  const BesselConfig& config() const noexcept { return cfg_; }

  BesselRecord run(StreamKey key) const {
    Walker w{*this, CounterStream(key)};
    w.run();
    return w.rec;
  }

 private:
  struct Walker {
    const BesselEngine& eng;
    CounterStream rs;
    BesselRecord rec{};
    double r = 0.0;
    double run_max = 0.0;
    double argmax_t = 0.0;
    bool tc_hit = false;
    bool tc_before_argmax = false;
    bool clock_valid = true;

    double when(double t) const noexcept { return clock_valid ? t : kUnknownTime; }

    void freeze(double t) {
      rec.max_r = run_max;
      rec.rho_time = argmax_t;
      rec.tc_before_rho = tc_before_argmax;
      rec.l_time = when(t);
      rec.tc_before_l = tc_hit;
    }

    bool ambiguous(const Segment& g) const noexcept {
      const auto& c = eng.cfg_;
      int n = may_cross(run_max - g.x0, run_max - g.x1, g.var);
      n += may_cross(c.level - g.x0, c.level - g.x1, g.var);
      if (!tc_hit) n += may_cross(g.x0 - c.c, g.x1 - c.c, g.var);
      return n >= 2;
    }

    void process(const Segment& g, SegmentDraws& draws) {
      if (draws.active() && g.depth < eng.cfg_.max_depth && ambiguous(g)) {
        const auto halves = bisect(g, draws.midpoint_normal());
        SegmentDraws left = draws.child(0);
        process(halves[0], left);
        SegmentDraws right = draws.child(1);
        process(halves[1], right);
        return;
      }
      const auto& c = eng.cfg_;
      const double tm = 0.5 * (g.t0 + g.t1);
      const double mx = segment_max(g, draws, run_max);
      const double old_max = run_max;
      const double old_t = argmax_t;
      const bool old_tc = tc_before_argmax;
      bool max_at_end = false;
      if (mx > run_max) {
        run_max = mx;
        max_at_end = mx == g.x1;
        argmax_t = when(max_at_end ? g.t1 : tm);
        tc_before_argmax = tc_hit;
      }
      if (!tc_hit && segment_min(g, draws, c.c) <= c.c) tc_hit = true;
      if (segment_crosses(g, draws, c.level - g.x0, c.level - g.x1, 2)) {
        const double tl = g.x1 == c.level ? g.t1 : tm;
        freeze(tl);
        // A maximum at the end of this leaf comes after an interior passage.
        if (max_at_end && tl < g.t1) {
          rec.max_r = old_max;
          rec.rho_time = old_t;
          rec.tc_before_rho = old_tc;
        }
      }
    }

    void run() {
      const auto& c = eng.cfg_;
      const TimeGrid& grid = eng.grid_;
      const ProcessKind kind = Bessel{c.dim, c.r0};
      const ReturnProbability ret{kind};
      r = c.r0;
      run_max = r;
      tc_hit = r <= c.c;
      tc_before_argmax = tc_hit;
      if (r == c.level) freeze(0.0);
      std::uint64_t k = 0;
      for (;;) {
        if (r > c.level && ret(r, c.level) <= c.prune_eps) {
          if (!c.continuation) {
            rec.pruned = true;
            break;
          }
          const auto u = rs.uniforms(k, kJumpLane);
          if (u[0] >= ret(r, c.level)) break;  // never returns
          const double m = bessel_excursion_max(c.dim, c.level, r, u[1]);
          clock_valid = false;
          if (m > run_max) {
            run_max = m;
            argmax_t = kUnknownTime;
            tc_before_argmax = tc_hit;
          }
          r = c.level;
          freeze(0.0);
          ++rec.jumps;
        }
        if (k >= grid.max_steps()) {
          rec.truncated = true;
          break;
        }
        ++k;
        const double x1 = apply_increment(kind, r, grid.dt(), draw_increment(kind, rs, k));
        Segment g{k, grid.time(k - 1), grid.time(k), r, x1, grid.dt()};
        SegmentDraws draws = c.bridge ? SegmentDraws(&rs, k, 1) : SegmentDraws();
        process(g, draws);
        r = x1;
      }
      rec.steps = k;
    }
  };

  BesselConfig cfg_;
  TimeGrid grid_;
};

// ---------------------------------------------------------------------------
// X = x0 + mu t + sigma B with mu < 0: L is the last passage at `level`, rho
// the last time before L at which X sits at its running minimum over [0, L].

struct DriftedConfig {
  double x0 = 0.0;
  double mu = -1.0;
  double sigma = 1.0;
  double level = 1.0;       // a
  double mart_level = 0.5;  // level of the hitting-probability martingale
  double prune_eps = 1e-4;
  bool bridge = true;
  int max_depth = kMaxRefineDepth;
};

struct DriftedRecord {
  double min_x = 0.0;          // inf X over [0, L]
  bool tb_before_rho = false;  // martingale stopping level reached before rho
  bool tb_before_l = false;
  bool l_seen = false;  // false when the level is never reached (L = 0)
  double rho_time = 0.0;
  double l_time = 0.0;
  bool truncated = false;
  std::uint64_t steps = 0;
};

class DriftedEngine {
 public:
  DriftedEngine(DriftedConfig cfg, TimeGrid grid) : cfg_(cfg), grid_(grid) {
    const ProcessKind kind = Drifted{cfg_.x0, cfg_.mu, cfg_.sigma};
    validate(kind);
    require_transient(kind);
    if (!(cfg_.prune_eps > 0.0 && cfg_.prune_eps < 1.0))
      throw ConfigError("drifted: prune_eps must lie in (0, 1)");
  }

  const DriftedConfig& config() const noexcept { return cfg_; }

  DriftedRecord run(StreamKey key) const {
    Walker w{*this, CounterStream(key)};
    w.run();
    return w.rec;
  }

 private:
  struct Walker {
    const DriftedEngine& eng;
    CounterStream rs;
    DriftedRecord rec{};
    double run_min = 0.0;
    double argmin_t = 0.0;
    bool tb_hit = false;
    bool tb_before_argmin = false;

    void freeze(double t) {
      rec.min_x = run_min;
      rec.rho_time = argmin_t;
      rec.tb_before_rho = tb_before_argmin;
      rec.l_time = t;
      rec.tb_before_l = tb_hit;
      rec.l_seen = true;
    }

    bool ambiguous(const Segment& g) const noexcept {
      const auto& c = eng.cfg_;
      int n = may_cross(g.x0 - run_min, g.x1 - run_min, g.var);
      n += may_cross(c.level - g.x0, c.level - g.x1, g.var);
      if (!tb_hit) n += may_cross(c.mart_level - g.x0, c.mart_level - g.x1, g.var);
      return n >= 2;
    }

    void process(const Segment& g, SegmentDraws& draws) {
      if (draws.active() && g.depth < eng.cfg_.max_depth && ambiguous(g)) {
        const auto halves = bisect(g, draws.midpoint_normal());
        SegmentDraws left = draws.child(0);
        process(halves[0], left);
        SegmentDraws right = draws.child(1);
        process(halves[1], right);
        return;
      }
      const auto& c = eng.cfg_;
      const double tm = 0.5 * (g.t0 + g.t1);
      const double mn = segment_min(g, draws, run_min);
      if (mn < run_min) {
        run_min = mn;
        argmin_t = mn == g.x1 ? g.t1 : tm;
        tb_before_argmin = tb_hit;
      }
      if (!tb_hit && segment_max(g, draws, c.mart_level) >= c.mart_level) tb_hit = true;
      if (segment_crosses(g, draws, c.level - g.x0, c.level - g.x1, 2))
        freeze(g.x1 == c.level ? g.t1 : tm);
    }

    void run() {
      const auto& c = eng.cfg_;
      const TimeGrid& grid = eng.grid_;
      const ProcessKind kind = Drifted{c.x0, c.mu, c.sigma};
      const ReturnProbability ret{kind};
      const double var = step_variance(kind, grid.dt());
      double x = c.x0;
      run_min = x;
      tb_hit = x >= c.mart_level;
      tb_before_argmin = tb_hit;
      rec.min_x = x;
      rec.tb_before_rho = tb_hit;
      if (x == c.level) freeze(0.0);
      std::uint64_t k = 0;
      while (!(x < c.level && ret(x, c.level) <= c.prune_eps)) {
        if (k >= grid.max_steps()) {
          rec.truncated = true;
          break;
        }
        ++k;
        const double x1 = apply_increment(kind, x, grid.dt(), draw_increment(kind, rs, k));
        Segment g{k, grid.time(k - 1), grid.time(k), x, x1, var};
        SegmentDraws draws = c.bridge ? SegmentDraws(&rs, k, 1) : SegmentDraws();
        process(g, draws);
        x = x1;
      }
      rec.steps = k;
    }
  };

  DriftedConfig cfg_;
  TimeGrid grid_;
};

// ---------------------------------------------------------------------------
// Brownian motion on [0, H]: g is the last zero before H, rho the last time
// before g at which |B_u| / sqrt(H - u) attains its running supremum.

struct GHorizonConfig {
  double horizon = 1.0;
  bool bridge = true;
  int max_depth = kMaxRefineDepth;
};

struct GHorizonRecord {
  double rho = 0.0;
  double b_rho = 0.0;
  double g_time = 0.0;
  double ratio_sup = 0.0;  // supremum of the ratio over [0, g]
  std::uint64_t steps = 0;
};

class GHorizonEngine {
 public:
  GHorizonEngine(GHorizonConfig cfg, TimeGrid grid) : cfg_(cfg), grid_(grid) {
    if (!(cfg_.horizon > 0.0)) throw ConfigError("g-horizon: horizon must be positive");
    if (grid_.snap(cfg_.horizon) > grid_.max_steps())
      throw ConfigError("g-horizon: horizon exceeds the grid");
  }

  const GHorizonConfig& config() const noexcept { return cfg_; }

  GHorizonRecord run(StreamKey key) const {
    Walker w{*this, CounterStream(key)};
    w.run();
    return w.rec;
  }

 private:
  struct Walker {
    const GHorizonEngine& eng;
    CounterStream rs;
    GHorizonRecord rec{};
    double sup = 0.0;
    double arg_t = 0.0;
    double arg_b = 0.0;

    double width(double t) const noexcept {
      return std::sqrt(std::max(eng.cfg_.horizon - t, 0.0));
    }

    bool ambiguous(const Segment& g) const noexcept {
      const double w0 = sup * width(g.t0);
      const double w1 = sup * width(g.t1);
      int n = may_cross(g.x0, g.x1, g.var);
      n += may_cross(w0 - g.x0, w1 - g.x1, g.var);
      n += may_cross(g.x0 + w0, g.x1 + w1, g.var);
      return n >= 2;
    }

    void consider(double ratio, double t, double b) {
      if (ratio >= sup) {
        sup = ratio;
        arg_t = t;
        arg_b = b;
      }
    }

    void process(const Segment& g, SegmentDraws& draws) {
      if (draws.active() && g.depth < eng.cfg_.max_depth && ambiguous(g)) {
        const auto halves = bisect(g, draws.midpoint_normal());
        SegmentDraws left = draws.child(0);
        process(halves[0], left);
        SegmentDraws right = draws.child(1);
        process(halves[1], right);
        return;
      }
      const double h = eng.cfg_.horizon;
      const double tm = 0.5 * (g.t0 + g.t1);
      const double old_t = arg_t;
      const double old_b = arg_b;
      const double old_sup = sup;
      if (draws.active()) {
        const double w0 = sup * width(g.t0);
        const double w1 = sup * width(g.t1);
        if (may_cross(w0 - g.x0, w1 - g.x1, g.var)) {
          const double m = bridge_max(g.x0, g.x1, g.var, draws.u(0));
          if (m > 0.0) consider(m / width(tm), tm, m);
        }
        if (may_cross(g.x0 + w0, g.x1 + w1, g.var)) {
          const double m = bridge_min(g.x0, g.x1, g.var, draws.u(1));
          if (m < 0.0) consider(-m / width(tm), tm, m);
        }
      }
      if (g.t1 < h) consider(std::abs(g.x1) / width(g.t1), g.t1, g.x1);
      if (g.x0 * g.x1 <= 0.0 || segment_crosses(g, draws, -g.x0, -g.x1, 2)) {
        rec.g_time = g.x1 == 0.0 ? g.t1 : tm;
        // A supremum reached after the zero inside this leaf is not frozen.
        const bool first = arg_t <= rec.g_time;
        rec.rho = first ? arg_t : old_t;
        rec.b_rho = first ? arg_b : old_b;
        rec.ratio_sup = first ? sup : old_sup;
      }
    }

    void run() {
      const TimeGrid& grid = eng.grid_;
      const std::uint64_t n = grid.snap(eng.cfg_.horizon);
      const bool bridge = eng.cfg_.bridge;
      double x = 0.0;
      for (std::uint64_t k = 1; k <= n; ++k) {
        const double x1 = x + std::sqrt(grid.dt()) * rs.normal(k);
        Segment g{k, grid.time(k - 1), grid.time(k), x, x1, grid.dt()};
        SegmentDraws draws = bridge ? SegmentDraws(&rs, k, 1) : SegmentDraws();
        process(g, draws);
        x = x1;
      }
      rec.steps = n;
    }
  };

  GHorizonConfig cfg_;
  TimeGrid grid_;
};

// ---------------------------------------------------------------------------
// rho = 1 / (1 + |B_2 - B_1|), read off a stored path on [0, 2].

struct SillyRecord {
  double rho = 0.0;  // grid time
  double b_rho = 0.0;
  double raw = 0.0;  // before snapping
};

class SillyEngine {
 public:
  explicit SillyEngine(TimeGrid grid) : grid_(grid) {
    if (grid_.snap(2.0) > grid_.max_steps())
      throw ConfigError("silly: the grid must reach time 2");
  }

  SillyRecord run(StreamKey key) const {
    CounterStream rs(key);
    const std::uint64_t n1 = grid_.snap(1.0);
    const std::uint64_t n2 = grid_.snap(2.0);
    std::vector<double> prefix(n1 + 1, 0.0);
    double x = 0.0;
    const double sq = std::sqrt(grid_.dt());
    for (std::uint64_t k = 1; k <= n2; ++k) {
      x += sq * rs.normal(k);
      if (k <= n1) prefix[k] = x;
    }
    const TimeDetection d = silly_time(prefix[n1], x, grid_);
    return {d.rho.time, prefix[d.rho.index], *d.mark("raw_time")};
  }

 private:
  TimeGrid grid_;
};

}  // namespace pst
