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

// One streaming pass over a Brownian path up to T_1 that records everything
// the Williams-family checks need: sigma, rho and S_rho, first passages at a
// set of levels, the Delta-construction times, fixed-time snapshots and the
// enlarged-filtration ratio witness.
//
// Steps far below zero take a short fast path. All other steps go through
// bridge monitoring; a step with two or more boundaries within reach is
// bisected until each leaf has at most one (or the depth cap is hit).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pst/bridge.hpp"
#include "pst/detectors.hpp"
#include "pst/errors.hpp"
#include "pst/grid.hpp"
#include "pst/philox.hpp"

namespace pst {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

struct WilliamsConfig {
  std::vector<double> fixed_times{0.25, 0.5, 1.0, 4.0};
  int quadrature_points = 64;
  std::vector<double> stop_levels{0.25, 0.5, 0.75};
  double delta_rate = 1.0;  // Delta_t = exp(-delta_rate * t)
  bool bridge = true;
  int max_depth = kMaxRefineDepth;
  double ratio_rel = 0.01;
};

// Auxiliary uniforms drawn once per path.
namespace aux {
inline constexpr std::uint32_t kTheta = 0;
inline constexpr std::uint32_t kLevel = 1;
}  // namespace aux

struct WilliamsRecord {
  bool truncated = false;
  double t_end = 0.0;  // T_1, or the horizon when truncated
  double b_end = 1.0;  // B at t_end
  double sigma = 0.0;
  double rho = 0.0;
  double s_rho = 0.0;
  // Last crossings before sigma of Z = 1 - B+ with Delta_t = exp(-rate t)
  // and with Delta_t = exp(-S_t), and B at those times.
  double rho_dt = 0.0;
  double b_rho_dt = 0.0;
  double rho_ds = 0.0;
  double b_rho_ds = 0.0;
  double theta = 0.0;     // Cox level
  double t_theta = kNever;
  double u_level = 0.0;   // independent uniform level
  double t_u = kNever;
  std::vector<double> quad_hits;
  std::vector<double> stop_hits;
  std::vector<double> s_fixed;
  std::vector<double> b_fixed;
  std::optional<double> ratio_witness;
  std::uint64_t steps = 0;
  std::uint64_t leaves = 0;

  // Does the ratio witness occur strictly before sigma?
  bool ratio_increase_before_sigma() const noexcept {
    return ratio_witness && *ratio_witness < sigma;
  }
};

inline double quadrature_node(int i, int n) noexcept {
  return (static_cast<double>(i) + 0.5) / static_cast<double>(n);
}

class WilliamsEngine {
 public:
  WilliamsEngine(WilliamsConfig cfg, TimeGrid grid)
      : cfg_(std::move(cfg)), grid_(grid) {
    if (cfg_.quadrature_points < 1)
      throw ConfigError("williams: quadrature_points must be >= 1");
    if (!(cfg_.delta_rate > 0.0)) throw ConfigError("williams: delta rate must be > 0");
    for (int i = 0; i < cfg_.quadrature_points; ++i)
      levels_.push_back({quadrature_node(i, cfg_.quadrature_points), i});
    for (std::size_t j = 0; j < cfg_.stop_levels.size(); ++j) {
      const double a = cfg_.stop_levels[j];
      if (!(a > 0.0 && a < 1.0)) throw ConfigError("williams: stop levels must lie in (0, 1)");
      levels_.push_back({a, cfg_.quadrature_points + static_cast<int>(j)});
    }
    std::sort(levels_.begin(), levels_.end());
    for (double t : cfg_.fixed_times) {
      if (!(t >= 0.0)) throw ConfigError("williams: fixed times must be >= 0");
      fixed_steps_.push_back(grid_.snap(t));
    }
    std::vector<std::size_t> order(fixed_steps_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return fixed_steps_[a] < fixed_steps_[b];
    });
    fixed_order_ = std::move(order);
  }

  const WilliamsConfig& config() const noexcept { return cfg_; }
  const TimeGrid& grid() const noexcept { return grid_; }

  WilliamsRecord run(StreamKey key) const {
    Walker w(*this, key);
    w.run();
    return std::move(w.rec);
  }

 private:
  struct Walker {
    const WilliamsEngine& eng;
    CounterStream rs;
    WilliamsRecord rec;
    std::size_t next_level = 0;
    std::size_t next_fixed = 0;
    double x = 0.0;
    double s = 0.0;
    double rho_cand = 0.0;
    double cand_dt = 0.0;
    double cand_b_dt = 0.0;
    double cand_ds = 0.0;
    double cand_b_ds = 0.0;
    bool done = false;
    EnlargedRatioMonitor ratio;

    Walker(const WilliamsEngine& e, StreamKey key)
        : eng(e), rs(key), ratio(e.cfg_.ratio_rel) {
      const auto& c = eng.cfg_;
      rec.quad_hits.assign(static_cast<std::size_t>(c.quadrature_points), kNever);
      rec.stop_hits.assign(c.stop_levels.size(), kNever);
      rec.s_fixed.assign(c.fixed_times.size(), 0.0);
      rec.b_fixed.assign(c.fixed_times.size(), 0.0);
      rec.theta = rs.aux_uniform(aux::kTheta);
      rec.u_level = rs.aux_uniform(aux::kLevel);
    }

    double b_rate(double t) const noexcept {
      return 1.0 - std::exp(-eng.cfg_.delta_rate * t);
    }
    static double b_max(double smax) noexcept { return 1.0 - std::exp(-smax); }

    void set_hit(int id, double t) {
      const int q = eng.cfg_.quadrature_points;
      if (id < q) rec.quad_hits[static_cast<std::size_t>(id)] = t;
      else rec.stop_hits[static_cast<std::size_t>(id - q)] = t;
    }

    // Credit every level in (s, m] with hitting time t.
    void pass_levels(double m, double t) {
      const auto& lv = eng.levels_;
      while (next_level < lv.size() && lv[next_level].first <= m)
        set_hit(lv[next_level++].second, t);
      if (rec.t_theta == kNever && rec.theta <= m) rec.t_theta = t;
      if (rec.t_u == kNever && rec.u_level <= m) rec.t_u = t;
    }

    void record_fixed(std::uint64_t k) {
      const auto& fs = eng.fixed_steps_;
      const auto& ord = eng.fixed_order_;
      while (next_fixed < ord.size() && fs[ord[next_fixed]] <= k) {
        rec.s_fixed[ord[next_fixed]] = s;
        rec.b_fixed[ord[next_fixed]] = x;
        ++next_fixed;
      }
    }

    bool ambiguous(const Segment& g) const noexcept {
      int n = 0;
      n += may_cross(g.x0, g.x1, g.var);
      n += may_cross(s - g.x0, s - g.x1, g.var);
      n += may_cross(b_rate(g.t0) - g.x0, b_rate(g.t1) - g.x1, g.var);
      const double c = b_max(s);
      n += may_cross(c - g.x0, c - g.x1, g.var);
      return n >= 2;
    }

    void process(const Segment& g, SegmentDraws& draws) {
      if (done) return;
      if (draws.active() && g.depth < eng.cfg_.max_depth && ambiguous(g)) {
        const auto halves = bisect(g, draws.midpoint_normal());
        SegmentDraws left = draws.child(0);
        process(halves[0], left);
        SegmentDraws right = draws.child(1);
        process(halves[1], right);
        return;
      }
      leaf(g, draws);
    }

    void leaf(const Segment& g, SegmentDraws& draws) {
      ++rec.leaves;
      const double tm = 0.5 * (g.t0 + g.t1);
      const double s_old = s;
      const double rho_old = rho_cand;
      const double dt_old = cand_dt;
      const double b_dt_old = cand_b_dt;
      const double ds_old = cand_ds;
      const double b_ds_old = cand_b_ds;
      const double mx = segment_max(g, draws, s);
      if (mx > s) {
        const double te = mx == g.x1 ? g.t1 : tm;
        if (mx >= 1.0) {
          finish(te);
          return;
        }
        pass_levels(mx, te);
        s = mx;
        rho_cand = te;
      }

      // Delta_t = exp(-rate t): boundary B = 1 - exp(-rate t).
      {
        const double c0 = b_rate(g.t0);
        const double c1 = b_rate(g.t1);
        const bool through = mx >= std::max(c0, c1) && (g.x0 < c0 || g.x1 < c1);
        if (through || segment_crosses(g, draws, c0 - g.x0, c1 - g.x1, 2)) {
          cand_dt = g.x1 == c1 ? g.t1 : (g.x0 == c0 ? g.t0 : tm);
          cand_b_dt = b_rate(cand_dt);
        }
      }
      // Delta_t = exp(-S_t): boundary B = 1 - exp(-S), moving with S.
      {
        const double c0 = b_max(s_old);
        const double c1 = b_max(s);
        const bool through = s > s_old && (g.x0 <= c0 || g.x1 <= c1);
        if (through || segment_crosses(g, draws, c0 - g.x0, c1 - g.x1, 3)) {
          cand_ds = g.x1 == c1 ? g.t1 : (g.x0 == c0 ? g.t0 : tm);
          cand_b_ds = cand_ds == g.t0 ? c0 : c1;
        }
      }

      // A zero touch is a new sigma candidate; every time defined as a last
      // event before sigma is frozen here. Without bridge draws only grid
      // values count, and x0 was already seen at the previous step. Events
      // of this leaf placed after the touch are not frozen.
      const bool touch = g.x1 <= 0.0 || (draws.active() && segment_min(g, draws, 0.0) <= 0.0);
      if (touch) {
        const double tz = g.x1 <= 0.0 ? g.t1 : tm;
        rec.sigma = tz;
        const bool max_first = rho_cand <= tz;
        rec.rho = max_first ? rho_cand : rho_old;
        rec.s_rho = max_first ? s : s_old;
        const bool dt_first = cand_dt <= tz;
        rec.rho_dt = dt_first ? cand_dt : dt_old;
        rec.b_rho_dt = dt_first ? cand_b_dt : b_dt_old;
        const bool ds_first = cand_ds <= tz;
        rec.rho_ds = ds_first ? cand_ds : ds_old;
        rec.b_rho_ds = ds_first ? cand_b_ds : b_ds_old;
      }
    }

    void finish(double t) {
      pass_levels(1.0, t);
      s = 1.0;
      x = 1.0;
      rec.t_end = t;
      rec.b_end = 1.0;
      done = true;
    }

    void run() {
      const TimeGrid& grid = eng.grid_;
      const double dt = grid.dt();
      const double sq = std::sqrt(dt);
      const double far = kFarExponent * dt;
      const bool bridge = eng.cfg_.bridge;
      const std::uint64_t kmax = grid.max_steps();
      std::uint64_t k = 0;
      record_fixed(0);
      while (!done) {
        if (k >= kmax) {
          rec.truncated = true;
          rec.t_end = grid.time(k);
          rec.b_end = x;
          break;
        }
        ++k;
        const double x1 = x + sq * rs.normal(k);
        if (x1 < 0.0 && x * x1 > far) {
          x = x1;
          rec.sigma = grid.time(k);
        } else {
          Segment g{k, grid.time(k - 1), grid.time(k), x, x1, dt};
          SegmentDraws draws = bridge ? SegmentDraws(&rs, k, 1) : SegmentDraws();
          process(g, draws);
          if (done) break;
          x = x1;
          ratio.observe(x, s, grid.time(k));
        }
        if (next_fixed < eng.fixed_order_.size() &&
            eng.fixed_steps_[eng.fixed_order_[next_fixed]] <= k)
          record_fixed(k);
      }
      // Snapshots after T_1 see the stopped path.
      record_fixed(std::numeric_limits<std::uint64_t>::max());
      rec.steps = k;
      rec.ratio_witness = ratio.witness();
    }
  };

  WilliamsConfig cfg_;
  TimeGrid grid_;
  std::vector<std::pair<double, int>> levels_;
  std::vector<std::uint64_t> fixed_steps_;
  std::vector<std::size_t> fixed_order_;
};

}  // namespace pst
