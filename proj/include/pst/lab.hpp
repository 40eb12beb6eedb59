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

// Experiment registry and runner. One Lab holds one configuration and
// caches the Williams pass, which every Brownian experiment reads from.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pst/coin.hpp"
#include "pst/constructions.hpp"
#include "pst/errors.hpp"
#include "pst/grid.hpp"
#include "pst/martlab.hpp"
#include "pst/parallel.hpp"
#include "pst/report.hpp"
#include "pst/williams.hpp"

namespace pst {

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 7;
  std::uint64_t n_paths = 20000;
  double dt = 1e-3;
  std::uint64_t max_steps = 20000000;
  std::vector<double> lambdas{0.5, 1.0, 2.0};
  std::vector<double> levels{0.25, 0.5, 0.75};
  std::optional<double> prune_eps;
  std::vector<int> p{2, 3};
  std::vector<int> K{16, 20};
  std::string output;
  unsigned workers = 0;  // 0: PST_WORKERS or hardware concurrency
  bool bridge = true;
  bool record_wall_time = false;
  // Cap on n_paths * max_steps; 0 disables the cap.
  std::uint64_t step_budget = 0;
  int random_terminals = 20;
  int terminal_steps = 4;
};

inline const std::vector<std::string>& registry() {
  static const std::vector<std::string> ids = {
      "williams",  "sigma-negative",    "terminaval", "conditional",      "masterformula",
      "bessel",    "drifted",           "g-horizon",  "delta-exp-lambda", "delta-exp-S",
      "cox",       "h-projection",      "min-with-stopping", "silly",     "t-s-family",
      "rho-law-ks", "enlarged-monotone", "coin"};
  return ids;
}

inline bool uses_williams(const std::string& id) {
  return id != "bessel" && id != "drifted" && id != "g-horizon" && id != "silly" && id != "coin";
}

inline void validate(const ExperimentConfig& c) {
  const auto& ids = registry();
  if (std::find(ids.begin(), ids.end(), c.experiment) == ids.end())
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  if (c.n_paths < 2) throw ConfigError("n_paths must be >= 2");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be > 0");
  if (c.max_steps < 1 || c.max_steps > kMaxSteps) throw ConfigError("max_steps out of range");
  if (c.lambdas.empty()) throw ConfigError("lambda list is empty");
  for (double l : c.lambdas)
    if (!(l > 0.0)) throw ConfigError("lambda values must be > 0");
  for (double a : c.levels)
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("levels must lie in (0, 1)");
  if (c.prune_eps && !(*c.prune_eps > 0.0 && *c.prune_eps < 1.0))
    throw ConfigError("prune_eps must lie in (0, 1)");
  for (int p : c.p)
    if (p < 1 || p > coin::kMaxLevel) throw ConfigError("p must lie in [1, 5]");
  for (int k : c.K)
    if (k < 1 || k > coin::kMaxHorizon) throw ConfigError("K must lie in [1, 24]");
  if (c.random_terminals < 0) throw ConfigError("random_terminals must be >= 0");
  if (c.terminal_steps < 0 || c.terminal_steps > 12)
    throw ConfigError("terminal_steps must lie in [0, 12]");
  if (c.step_budget > 0 && c.experiment != "coin") {
    const long double need = static_cast<long double>(c.n_paths) * c.max_steps;
    if (need > static_cast<long double>(c.step_budget))
      throw BudgetExceeded("n_paths * max_steps exceeds step_budget");
  }
}

// Independent seed per construction family.
inline std::uint64_t family_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace family {
inline constexpr std::uint64_t kBessel = 1;
inline constexpr std::uint64_t kDrifted = 2;
inline constexpr std::uint64_t kGHorizon = 3;
inline constexpr std::uint64_t kSilly = 4;
inline constexpr std::uint64_t kReference = 5;
}  // namespace family

class Lab {
 public:
  explicit Lab(ExperimentConfig cfg) : cfg_(std::move(cfg)), grid_(cfg_.dt, cfg_.max_steps) {
    if (cfg_.workers == 0) cfg_.workers = default_workers();
  }

  const ExperimentConfig& config() const noexcept { return cfg_; }

  std::vector<CheckReport> run(const std::string& id) {
    ExperimentConfig c = cfg_;
    c.experiment = id;
    validate(c);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckReport> rows = dispatch(id);
    if (cfg_.record_wall_time) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      for (auto& r : rows) r.wall_time_s = secs;
    }
    return rows;
  }

  std::vector<CheckReport> run() { return run(cfg_.experiment); }

  const std::vector<WilliamsRecord>& williams_records() {
    if (!williams_) {
      WilliamsEngine eng(williams_config(), grid_);
      williams_ = parallel_map(cfg_.n_paths, cfg_.workers, [&](std::size_t i) {
        return eng.run({cfg_.seed, i});
      });
    }
    return *williams_;
  }

  WilliamsConfig williams_config() const {
    WilliamsConfig w;
    w.stop_levels = cfg_.levels;
    w.bridge = cfg_.bridge;
    return w;
  }

  BesselConfig bessel_config() const {
    BesselConfig b;
    if (cfg_.prune_eps) b.prune_eps = *cfg_.prune_eps;
    b.bridge = cfg_.bridge;
    return b;
  }

  DriftedConfig drifted_config() const {
    DriftedConfig d;
    if (cfg_.prune_eps) d.prune_eps = *cfg_.prune_eps;
    d.bridge = cfg_.bridge;
    return d;
  }

 private:
  template <class Engine>
  auto simulate(const Engine& eng, std::uint64_t tag) const {
    const std::uint64_t s = family_seed(cfg_.seed, tag);
    return parallel_map(cfg_.n_paths, cfg_.workers,
                        [&](std::size_t i) { return eng.run({s, i}); });
  }

  std::vector<CheckReport> dispatch(const std::string& id) {
    if (id == "coin") return coin_rows(id);
    if (id == "bessel") {
      const BesselConfig bc = bessel_config();
      return bessel_rows(id, bc, simulate(BesselEngine(bc, grid_), family::kBessel));
    }
    if (id == "drifted") {
      const DriftedConfig dc = drifted_config();
      return drifted_rows(id, dc, simulate(DriftedEngine(dc, grid_), family::kDrifted));
    }
    if (id == "g-horizon") {
      GHorizonConfig gc;
      gc.bridge = cfg_.bridge;
      return ghorizon_rows(id, simulate(GHorizonEngine(gc, grid_), family::kGHorizon),
                           cfg_.lambdas);
    }
    if (id == "silly")
      return silly_rows(id, simulate(SillyEngine(grid_), family::kSilly), cfg_.lambdas);

    const WilliamsConfig wc = williams_config();
    const WilliamsSample s{williams_records(), wc, grid_.horizon()};
    const auto& L = cfg_.lambdas;
    std::vector<CheckReport> rows;
    const auto add = [&](std::vector<CheckReport> more) {
      for (auto& r : more) rows.push_back(std::move(r));
    };
    if (id == "williams") {
      add(ept_rows(id, s, L));
      rows.push_back(srho_ks_row(id, s));
      add(sigma_rows(id, s, L));
      add(linear_rows(id, s));
      rows.push_back(truncation_row(id, s));
    } else if (id == "sigma-negative") {
      add(sigma_rows(id, s, L));
    } else if (id == "terminaval") {
      add(terminaval_rows(id, s, L));
    } else if (id == "conditional") {
      add(conditional_rows(id, s, L));
    } else if (id == "masterformula") {
      add(masterformula_rows(id, s));
    } else if (id == "delta-exp-lambda") {
      add(delta_rate_rows(id, s));
    } else if (id == "delta-exp-S") {
      add(delta_max_rows(id, s, L));
    } else if (id == "cox") {
      add(cox_rows(id, s, L));
    } else if (id == "h-projection") {
      add(hprojection_rows(id, s));
    } else if (id == "min-with-stopping") {
      add(min_stopping_rows(id, s, L));
    } else if (id == "t-s-family") {
      add(ts_family_rows(id, s, L));
    } else if (id == "rho-law-ks") {
      add(rho_law_rows(id, s, family_seed(cfg_.seed, family::kReference)));
    } else if (id == "enlarged-monotone") {
      rows.push_back(enlarged_row(id, s));
    }
    return rows;
  }

  static CheckReport interval_row(const std::string& exp, std::string id,
                                  const coin::IntervalValue& iv, const coin::BigRational& target) {
    CheckReport r;
    r.experiment = exp;
    r.check_id = std::move(id);
    r.lo = iv.lo.get_d();
    r.hi = iv.hi.get_d();
    r.target = target.get_d();
    r.lo_rational = coin::to_text(iv.lo);
    r.hi_rational = coin::to_text(iv.hi);
    r.verdict = verdict_of(iv.contains(target));
    return r;
  }

  std::vector<CheckReport> coin_rows(const std::string& exp) const {
    std::vector<coin::TerminalMartingale> marts{coin::first_step_up()};
    for (int k = 0; k < cfg_.random_terminals; ++k)
      marts.push_back(coin::random_terminal(cfg_.seed * 1000 + static_cast<std::uint64_t>(k),
                                            cfg_.terminal_steps));
    const std::vector<coin::PathWord> prefixes = coin::all_words(3);
    const bool many = cfg_.p.size() * cfg_.K.size() > 1;
    std::vector<CheckReport> rows;
    for (int p : cfg_.p) {
      for (int K : cfg_.K) {
        const std::string pre =
            many ? "p" + std::to_string(p) + "_K" + std::to_string(K) + "_" : std::string{};
        const coin::CoinSummary s = coin::summarize(p, K, marts, prefixes);
        const coin::BigRational inv_p(1, p);
        for (std::size_t j = 0; j < s.m_law.size(); ++j)
          rows.push_back(interval_row(exp, pre + "m_law_" + std::to_string(j), s.m_law[j], inv_p));
        rows.push_back(interval_row(exp, pre + "ept_gamma_F1", s.gamma[0], marts[0].initial()));
        for (std::size_t i = 1; i < marts.size(); ++i)
          rows.push_back(interval_row(exp, pre + "ept_gamma_rand_" + std::to_string(i - 1),
                                      s.gamma[i], marts[i].initial()));
        for (std::size_t i = 0; i < prefixes.size(); ++i)
          rows.push_back(interval_row(exp, pre + "post_eta_" + coin::word_text(prefixes[i]),
                                      s.post_eta[i], coin::q_prob_stopped(prefixes[i], p)));
        const coin::BigRational total = s.enumerated + s.tail;
        CheckReport mass = interval_row(exp, pre + "mass_conservation", {total, total}, 1);
        mass.estimate = total.get_d();
        rows.push_back(mass);
        CheckReport inv;
        inv.experiment = exp;
        inv.check_id = pre + "decomposition_invariants";
        inv.estimate = s.invariants_hold ? 1.0 : 0.0;
        inv.target = 1.0;
        inv.verdict = verdict_of(s.invariants_hold);
        rows.push_back(inv);
      }
    }
    return rows;
  }

  ExperimentConfig cfg_;
  TimeGrid grid_;
  std::optional<std::vector<WilliamsRecord>> williams_;
};

}  // namespace pst
