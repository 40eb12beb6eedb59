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

// Monte Carlo identity and falsification checks over simulated records.
// Every function returns finished report rows; bias bounds come from
// analytic truncation or pruning formulas only.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "pst/constructions.hpp"
#include "pst/martingale.hpp"
#include "pst/report.hpp"
#include "pst/stats.hpp"
#include "pst/supermartingale.hpp"
#include "pst/williams.hpp"

namespace pst {

inline std::string num_id(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

template <class R, class F>
std::vector<double> column(const std::vector<R>& recs, F&& f) {
  std::vector<double> out;
  out.reserve(recs.size());
  for (const auto& r : recs) out.push_back(static_cast<double>(f(r)));
  return out;
}

// ---------------------------------------------------------------------------
// Closed forms.

// E[M_sigma] for the stopped exponential martingale: e^-l sinh(l) / l.
inline double esigma_target(double lambda) {
  return (1.0 - std::exp(-2.0 * lambda)) / (2.0 * lambda);
}

// E[M_inf 1{Z_rho <= 1/2}].
inline double conditional_half_target(double lambda) {
  return (std::exp(-lambda) - std::exp(-2.0 * lambda)) / (1.0 - std::exp(-2.0 * lambda));
}

// E[exp(-lambda S_rho)] with S_rho uniform.
inline double sigma_rho_target(double lambda) { return (1.0 - std::exp(-lambda)) / lambda; }

// int_0^1 E[exp(-T_y)] dy = int_0^1 exp(-y sqrt 2) dy.
inline double masterformula_exp_target() {
  return (1.0 - std::exp(-std::sqrt(2.0))) / std::sqrt(2.0);
}

// E[exp(-theta g)] for g the last zero before 1 (arcsine law).
inline double arcsine_laplace(double theta) {
  return std::exp(-0.5 * theta) * boost::math::cyl_bessel_i(0, 0.5 * theta);
}

// E[M_L] for the BES hitting-probability martingale: L follows T_c whenever
// T_c is finite, so M_L = 1 on that event and (c / level)^(n-2) otherwise.
inline double bessel_ml_target(const BesselConfig& c) {
  const double pc = std::pow(c.c / c.r0, c.dim - 2);  // P[T_c < inf]
  const double m0 = std::pow(c.c / c.level, c.dim - 2);
  return pc + (1.0 - pc) * m0;
}

inline double drifted_m0(const DriftedConfig& c) {
  return MartingaleSpec{mart::HitprobDrifted{c.mart_level, c.mu, c.sigma}}.value(c.x0, 0.0);
}

// E[M_L]: L exists iff X reaches the level (then M_L = 1), else L = 0.
inline double drifted_ml_target(const DriftedConfig& c) {
  const double hit = drift_scale(c.x0, c.mu, c.sigma) / drift_scale(c.level, c.mu, c.sigma);
  return hit + (1.0 - hit) * drifted_m0(c);
}

// ---------------------------------------------------------------------------
// Williams family.

struct WilliamsSample {
  const std::vector<WilliamsRecord>& recs;
  const WilliamsConfig& cfg;
  double horizon;

  double p_trunc() const { return hitting_survival(horizon); }

  // M at a first-passage time of level y, or at the horizon if unreached.
  static double m_at_hit(double lambda, double y, double t_hit, const WilliamsRecord& r) {
    if (t_hit == kNever) return exp_martingale(lambda, r.b_end, r.t_end);
    return exp_martingale(lambda, y, t_hit);
  }
  static double m_rho(double lambda, const WilliamsRecord& r) {
    return exp_martingale(lambda, r.s_rho, r.rho);
  }
  static double m_inf(double lambda, const WilliamsRecord& r) {
    return exp_martingale(lambda, r.b_end, r.t_end);
  }
  std::optional<std::size_t> fixed_index(double t) const {
    for (std::size_t i = 0; i < cfg.fixed_times.size(); ++i)
      if (cfg.fixed_times[i] == t) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> stop_index(double a) const {
    for (std::size_t i = 0; i < cfg.stop_levels.size(); ++i)
      if (cfg.stop_levels[i] == a) return i;
    return std::nullopt;
  }
};

inline std::vector<CheckReport> ept_rows(const std::string& exp, const WilliamsSample& s,
                                         const std::vector<double>& lambdas) {
  std::vector<CheckReport> out;
  for (double l : lambdas) {
    auto v = column(s.recs, [&](const WilliamsRecord& r) { return WilliamsSample::m_rho(l, r); });
    out.push_back(agree_row(exp, "ept_exp_" + num_id(l), mc_mean(v, std::exp(l) * s.p_trunc()), 1.0));
  }
  return out;
}

inline CheckReport srho_ks_row(const std::string& exp, const WilliamsSample& s) {
  auto v = column(s.recs, [](const WilliamsRecord& r) { return r.s_rho; });
  return ks_row(exp, "srho_uniform_ks",
                ks_one_sample(v, [](double x) { return std::clamp(x, 0.0, 1.0); }));
}

inline std::vector<CheckReport> sigma_rows(const std::string& exp, const WilliamsSample& s,
                                           const std::vector<double>& lambdas) {
  std::vector<CheckReport> out;
  for (double l : lambdas) {
    auto v = column(s.recs, [&](const WilliamsRecord& r) { return exp_martingale(l, 0.0, r.sigma); });
    const MCEstimate e = mc_mean(v, s.p_trunc());
    const std::string sfx = l == 1.0 ? "" : "_exp_" + num_id(l);
    out.push_back(agree_row(exp, "esigma_neg_control" + sfx, e, esigma_target(l)));
    out.push_back(differ_row(exp, "esigma_differs_from_one" + sfx, e, 1.0));
  }
  return out;
}

inline std::vector<CheckReport> linear_rows(const std::string& exp, const WilliamsSample& s) {
  auto v = column(s.recs, [](const WilliamsRecord& r) { return r.s_rho; });
  const MCEstimate e = mc_mean(v, s.p_trunc());
  return {agree_row(exp, "linear_nonh1_half", e, 0.5),
          differ_row(exp, "linear_nonh1_not_zero", e, 0.0)};
}

inline CheckReport truncation_row(const std::string& exp, const WilliamsSample& s) {
  auto v = column(s.recs, [](const WilliamsRecord& r) { return r.truncated ? 1.0 : 0.0; });
  return agree_row(exp, "truncation_rate", mc_mean(v), s.p_trunc());
}

inline std::vector<CheckReport> terminaval_rows(const std::string& exp, const WilliamsSample& s,
                                                const std::vector<double>& lambdas) {
  std::vector<CheckReport> out;
  for (double l : lambdas) {
    const double bias = std::exp(l) * s.p_trunc();
    const std::string sfx = "_exp_" + num_id(l);
    auto ind = column(s.recs, [&](const WilliamsRecord& r) {
      return WilliamsSample::m_rho(l, r) * (1.0 - r.s_rho <= 0.5 ? 1.0 : 0.0);
    });
    out.push_back(agree_row(exp, "tv_indicator_half" + sfx, mc_mean(ind, bias), 0.5));
    auto lin = column(s.recs, [&](const WilliamsRecord& r) {
      return WilliamsSample::m_rho(l, r) * (1.0 - r.s_rho);
    });
    out.push_back(agree_row(exp, "tv_identity" + sfx, mc_mean(lin, bias), 0.5));
    auto one = column(s.recs, [&](const WilliamsRecord& r) { return WilliamsSample::m_rho(l, r); });
    out.push_back(agree_row(exp, "tv_one" + sfx, mc_mean(one, bias), 1.0));

    // For M in [0, 1] the estimates of E[M_rho] and E[1 - M_rho] add to 1.
    std::vector<double> scaled;
    std::vector<double> comp;
    for (double m : one) {
      scaled.push_back(m * std::exp(-l));
      comp.push_back(1.0 - m * std::exp(-l));
    }
    const double total = pairwise_sum(scaled) / static_cast<double>(scaled.size()) +
                         pairwise_sum(comp) / static_cast<double>(comp.size());
    CheckReport r;
    r.experiment = exp;
    r.check_id = "tv_antisymmetry" + sfx;
    r.estimate = total;
    r.n = static_cast<double>(scaled.size());
    r.bias_bound = 1e-12;
    r.target = 1.0;
    r.verdict = verdict_of(std::abs(total - 1.0) <= 1e-12);
    out.push_back(r);
  }
  return out;
}

inline std::vector<CheckReport> conditional_rows(const std::string& exp, const WilliamsSample& s,
                                                 const std::vector<double>& lambdas) {
  std::vector<CheckReport> out;
  const double p = s.p_trunc();
  for (double l : lambdas) {
    const std::string sfx = "_exp_" + num_id(l);
    const double factor = l / std::sinh(l);
    const double zfactor = 2.0 * l / (1.0 - std::exp(-2.0 * l));
    const auto phi = [&](const WilliamsRecord& r) {
      return exp_martingale(l, 1.0 - r.s_rho, r.rho) * factor;
    };
    const double b_inf = std::exp(l);
    const double b_phi = std::exp(l) * factor;

    // (a) E[M_inf g(rho, B_rho)] = E[Phi(rho, B_rho) g(rho, B_rho)].
    const std::vector<std::pair<std::string, std::function<double(const WilliamsRecord&)>>> gs = {
        {"one", [](const WilliamsRecord&) { return 1.0; }},
        {"early", [](const WilliamsRecord& r) { return r.rho <= 1.0 ? 1.0 : 0.0; }},
        {"brho", [](const WilliamsRecord& r) { return r.s_rho; }},
    };
    for (const auto& [name, g] : gs) {
      auto d = column(s.recs, [&](const WilliamsRecord& r) {
        return (WilliamsSample::m_inf(l, r) - phi(r)) * g(r);
      });
      out.push_back(agree_row(exp, "cond_frho_" + name + sfx, mc_mean(d, (b_inf + b_phi) * p), 0.0));
    }

    // (b) E[M_inf f(Z_rho)] against the closed form and the Z-conditional formula.
    const auto f = [](const WilliamsRecord& r) { return 1.0 - r.s_rho <= 0.5 ? 1.0 : 0.0; };
    auto minf_f = column(s.recs, [&](const WilliamsRecord& r) { return WilliamsSample::m_inf(l, r) * f(r); });
    out.push_back(agree_row(exp, "cond_minf_indicator_half" + sfx, mc_mean(minf_f, b_inf * p),
                            conditional_half_target(l)));
    auto zd = column(s.recs, [&](const WilliamsRecord& r) {
      return (WilliamsSample::m_inf(l, r) - zfactor * std::exp(-2.0 * l * r.s_rho)) * f(r);
    });
    out.push_back(agree_row(exp, "cond_zrho_formula" + sfx, mc_mean(zd, (b_inf + zfactor) * p), 0.0));

    // (c) M_inf and M_rho give different answers against f(Z_rho).
    auto fd = column(s.recs, [&](const WilliamsRecord& r) {
      return (WilliamsSample::m_inf(l, r) - WilliamsSample::m_rho(l, r)) * f(r);
    });
    out.push_back(differ_row(exp, "cond_falsify" + sfx, mc_mean(fd, 2.0 * b_inf * p), 0.0));

    // E[exp(-l^2 (sigma - rho) / 2) | F_rho] = exp(-l S_rho).
    auto sr = column(s.recs, [&](const WilliamsRecord& r) {
      return std::exp(-0.5 * l * l * (r.sigma - r.rho));
    });
    out.push_back(agree_row(exp, "cond_sigma_rho" + sfx, mc_mean(sr, p), sigma_rho_target(l)));
  }
  return out;
}

inline std::vector<CheckReport> masterformula_rows(const std::string& exp,
                                                   const WilliamsSample& s) {
  std::vector<CheckReport> out;
  const int q = s.cfg.quadrature_points;
  const double h = 1.0 / q;
  const double p = s.p_trunc();
  struct Kernel {
    std::string name;
    std::function<double(double, double)> k;
    double variation;  // bound on the per-path variation in y
    std::optional<double> target;
  };
  const std::vector<Kernel> ks = {
      {"y", [](double y, double) { return y; }, 0.0, 0.5},
      {"exp", [](double, double t) { return t == kNever ? 0.0 : std::exp(-t); }, 1.0,
       masterformula_exp_target()},
      {"y_early", [](double y, double t) { return t <= 1.0 ? y : 0.0; }, 2.0, std::nullopt},
  };
  for (const auto& K : ks) {
    const double quad = 0.5 * h * K.variation;
    auto lhs = column(s.recs, [&](const WilliamsRecord& r) { return K.k(r.s_rho, r.rho); });
    auto rhs = column(s.recs, [&](const WilliamsRecord& r) {
      std::vector<double> cell(static_cast<std::size_t>(q));
      for (int i = 0; i < q; ++i)
        cell[static_cast<std::size_t>(i)] =
            K.k(quadrature_node(i, q), r.quad_hits[static_cast<std::size_t>(i)]);
      return pairwise_sum(cell) * h;
    });
    std::vector<double> diff(lhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) diff[i] = lhs[i] - rhs[i];
    const MCEstimate le = mc_mean(lhs, p);
    const MCEstimate re = mc_mean(rhs, p + quad);
    if (K.target) {
      out.push_back(agree_row(exp, "mf_" + K.name + "_lhs", le, *K.target));
      out.push_back(agree_row(exp, "mf_" + K.name + "_rhs", re, *K.target));
    } else {
      out.push_back(info_row(exp, "mf_" + K.name + "_lhs", le));
      out.push_back(info_row(exp, "mf_" + K.name + "_rhs", re));
    }
    out.push_back(agree_row(exp, "mf_" + K.name + "_diff", mc_mean(diff, 2.0 * p + quad), 0.0));
  }
  return out;
}

inline std::vector<CheckReport> delta_rate_rows(const std::string& exp, const WilliamsSample& s) {
  std::vector<CheckReport> out;
  const double rate = s.cfg.delta_rate;
  auto v = column(s.recs, [](const WilliamsRecord& r) { return r.rho_dt; });
  out.push_back(ks_row(exp, "dl_exponential_ks",
                       ks_one_sample(v, [rate](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x); })));
  for (double t : {0.05, 0.25, 1.0}) {
    auto ind = column(s.recs, [t](const WilliamsRecord& r) { return r.rho_dt <= t ? 1.0 : 0.0; });
    out.push_back(info_row(exp, "dl_cdf_" + num_id(t), mc_mean(ind, s.p_trunc()),
                           1.0 - std::exp(-rate * t)));
  }
  auto m = column(s.recs, [](const WilliamsRecord& r) { return exp_martingale(1.0, r.b_rho_dt, r.rho_dt); });
  out.push_back(info_row(exp, "dl_ept_exp_1", mc_mean(m, std::exp(1.0) * s.p_trunc()), 1.0));
  return out;
}

inline std::vector<CheckReport> delta_max_rows(const std::string& exp, const WilliamsSample& s,
                                               const std::vector<double>& lambdas) {
  std::vector<CheckReport> out;
  const double p = s.p_trunc();
  for (double l : lambdas) {
    auto m = column(s.recs, [&](const WilliamsRecord& r) { return exp_martingale(l, r.b_rho_ds, r.rho_ds); });
    out.push_back(agree_row(exp, "ds_ept_exp_" + num_id(l), mc_mean(m, std::exp(l) * p), 1.0));
  }
  for (double t : {0.25, 1.0, 4.0}) {
    const auto idx = s.fixed_index(t);
    if (!idx) continue;
    const std::size_t i = *idx;
    auto d = column(s.recs, [&](const WilliamsRecord& r) {
      return (r.rho_ds > t ? 1.0 : 0.0) - std::exp(-r.s_fixed[i]);
    });
    out.push_back(agree_row(exp, "ds_survival_" + num_id(t), mc_mean(d, p), 0.0));
    // Diagnostic: survival against E[Z_t ^ Delta_t].
    auto dm = column(s.recs, [&](const WilliamsRecord& r) {
      const double z = 1.0 - std::max(r.b_fixed[i], 0.0);
      return (r.rho_ds > t ? 1.0 : 0.0) - std::min(z, std::exp(-r.s_fixed[i]));
    });
    out.push_back(info_row(exp, "ds_survival_min_" + num_id(t), mc_mean(dm, p), 0.0));
  }
  return out;
}

inline std::vector<CheckReport> cox_rows(const std::string& exp, const WilliamsSample& s,
                                         const std::vector<double>& lambdas) {
  std::vector<CheckReport> out;
  const double p = s.p_trunc();
  for (double l : lambdas) {
    auto m = column(s.recs, [&](const WilliamsRecord& r) {
      return WilliamsSample::m_at_hit(l, r.theta, r.t_theta, r);
    });
    out.push_back(agree_row(exp, "cox_ept_exp_" + num_id(l), mc_mean(m, std::exp(l) * p), 1.0));
  }
  for (std::size_t i = 0; i < s.cfg.fixed_times.size(); ++i) {
    const double t = s.cfg.fixed_times[i];
    auto d = column(s.recs, [&](const WilliamsRecord& r) {
      return (r.t_theta > t ? 1.0 : 0.0) - (1.0 - r.s_fixed[i]);
    });
    out.push_back(agree_row(exp, "cox_survival_" + num_id(t), mc_mean(d, p), 0.0));
  }
  auto inc = column(s.recs, [](const WilliamsRecord& r) { return r.t_theta == kNever ? 1.0 : 0.0; });
  out.push_back(info_row(exp, "cox_clock_incomplete", mc_mean(inc)));
  return out;
}

inline std::vector<CheckReport> hprojection_rows(const std::string& exp, const WilliamsSample& s,
                                                 double lambda = 1.0) {
  std::vector<CheckReport> out;
  const double bias = std::exp(lambda) * s.p_trunc();
  const std::string sfx = "_exp_" + num_id(lambda);
  bool any = false;
  MCEstimate best{};
  for (std::size_t i = 0; i < s.cfg.fixed_times.size(); ++i) {
    const double t = s.cfg.fixed_times[i];
    auto cox = column(s.recs, [&](const WilliamsRecord& r) {
      return WilliamsSample::m_inf(lambda, r) * ((r.t_theta > t ? 1.0 : 0.0) - (1.0 - r.s_fixed[i]));
    });
    out.push_back(agree_row(exp, "hproj_cox_t" + num_id(t) + sfx, mc_mean(cox, bias), 0.0));
    auto wil = column(s.recs, [&](const WilliamsRecord& r) {
      return WilliamsSample::m_inf(lambda, r) * ((r.rho > t ? 1.0 : 0.0) - (1.0 - r.s_fixed[i]));
    });
    const MCEstimate we = mc_mean(wil, bias);
    out.push_back(info_row(exp, "hproj_williams_t" + num_id(t) + sfx, we, 0.0));
    if (differs(we, 0.0) && !any) {
      any = true;
      best = we;
    } else if (!any && std::abs(we.mean) / std::max(we.se, 1e-300) >
                           std::abs(best.mean) / std::max(best.se, 1e-300)) {
      best = we;
    }
  }
  CheckReport r = differ_row(exp, "hproj_williams_any" + sfx, best, 0.0);
  r.verdict = verdict_of(any);
  out.push_back(r);
  auto d0 = column(s.recs, [&](const WilliamsRecord& r0) {
    return WilliamsSample::m_inf(lambda, r0) * ((r0.rho > 0.0 ? 1.0 : 0.0) - 1.0);
  });
  out.push_back(info_row(exp, "hproj_t0" + sfx, mc_mean(d0, bias), 0.0));
  return out;
}

inline std::vector<CheckReport> min_stopping_rows(const std::string& exp, const WilliamsSample& s,
                                                  const std::vector<double>& lambdas) {
  std::vector<CheckReport> out;
  for (std::size_t j = 0; j < s.cfg.stop_levels.size(); ++j) {
    const double a = s.cfg.stop_levels[j];
    for (double l : lambdas) {
      auto m = column(s.recs, [&](const WilliamsRecord& r) {
        if (r.s_rho < a) return WilliamsSample::m_rho(l, r);
        return WilliamsSample::m_at_hit(l, a, r.stop_hits[j], r);
      });
      out.push_back(agree_row(exp, "mws_a" + num_id(a) + "_exp_" + num_id(l),
                              mc_mean(m, std::exp(l) * s.p_trunc()), 1.0));
    }
  }
  return out;
}

inline std::vector<CheckReport> ts_family_rows(const std::string& exp, const WilliamsSample& s,
                                               const std::vector<double>& lambdas) {
  std::vector<CheckReport> out;
  const double p = s.p_trunc();
  for (double l : lambdas) {
    auto m = column(s.recs, [&](const WilliamsRecord& r) {
      return WilliamsSample::m_at_hit(l, r.u_level, r.t_u, r);
    });
    out.push_back(agree_row(exp, "ts_ept_exp_" + num_id(l), mc_mean(m, std::exp(l) * p), 1.0));
  }
  if (const auto j = s.stop_index(0.5)) {
    for (double l : lambdas) {
      auto m = column(s.recs, [&](const WilliamsRecord& r) {
        return WilliamsSample::m_at_hit(l, 0.5, r.stop_hits[*j], r);
      });
      out.push_back(agree_row(exp, "ts_degenerate_half_exp_" + num_id(l),
                              mc_mean(m, std::exp(l) * p), 1.0));
    }
  }
  auto tu = column(s.recs, [&](const WilliamsRecord& r) { return std::min(r.t_u, s.horizon); });
  auto rho = column(s.recs, [](const WilliamsRecord& r) { return r.rho; });
  out.push_back(ks_row(exp, "ts_ks_vs_williams_rho", ks_two_sample(tu, rho)));
  return out;
}

// Independent reference samplers for the law checks.
inline std::vector<double> u2_over_n2(std::uint64_t seed, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterStream rs({seed, i});
    const double u = rs.aux_uniform(0);
    const double g = rs.aux_normal(0);
    out[i] = u * u / (g * g);
  }
  return out;
}

inline std::vector<double> one_over_n2(std::uint64_t seed, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterStream rs({seed, i});
    const double g = rs.aux_normal(1);
    out[i] = 1.0 / (g * g);
  }
  return out;
}

inline std::vector<CheckReport> rho_law_rows(const std::string& exp, const WilliamsSample& s,
                                             std::uint64_t ref_seed) {
  auto rho = column(s.recs, [](const WilliamsRecord& r) { return r.rho; });
  auto ref = u2_over_n2(ref_seed, s.recs.size());
  auto t1 = column(s.recs, [&](const WilliamsRecord& r) { return std::min(r.t_end, s.horizon); });
  auto ref1 = one_over_n2(ref_seed, s.recs.size());
  for (double& v : ref1) v = std::min(v, s.horizon);
  return {ks_row(exp, "rho_law_ks", ks_two_sample(rho, ref)),
          ks_row(exp, "t1_law_ks", ks_two_sample(t1, ref1))};
}

inline CheckReport enlarged_row(const std::string& exp, const WilliamsSample& s) {
  auto v = column(s.recs, [](const WilliamsRecord& r) { return r.ratio_increase_before_sigma() ? 1.0 : 0.0; });
  const MCEstimate e = mc_mean(v);
  CheckReport r = info_row(exp, "enlarged_increase_fraction", e, 0.01);
  r.verdict = verdict_of(e.mean >= 0.01);
  return r;
}

// ---------------------------------------------------------------------------
// Generalized constructions.

inline std::vector<CheckReport> bessel_rows(const std::string& exp, const BesselConfig& c,
                                            const std::vector<BesselRecord>& recs) {
  const MartingaleSpec m{mart::HitprobBessel{c.c, c.dim}};
  const double bias = c.continuation ? 0.0 : c.prune_eps;
  const double m0 = m.value(c.r0, 0.0);
  auto mr = column(recs, [&](const BesselRecord& r) { return m.value(r.max_r, 0.0, r.tc_before_rho); });
  auto ml = column(recs, [&](const BesselRecord& r) { return m.value(c.level, 0.0, r.tc_before_l); });
  auto z = column(recs, [&](const BesselRecord& r) {
    return track_value(track::BesselN{c.dim}, r.max_r / c.level, 0.0);
  });
  const MCEstimate le = mc_mean(ml, bias);
  auto trunc = column(recs, [](const BesselRecord& r) { return r.truncated ? 1.0 : 0.0; });
  return {agree_row(exp, "bessel_ept", mc_mean(mr, bias), m0),
          ks_row(exp, "bessel_zrho_uniform_ks",
                 ks_one_sample(z, [](double x) { return std::clamp(x, 0.0, 1.0); })),
          agree_row(exp, "bessel_ml_neg_control", le, bessel_ml_target(c)),
          differ_row(exp, "bessel_ml_differs", le, m0),
          info_row(exp, "bessel_truncated", mc_mean(trunc), 0.0)};
}

inline std::vector<CheckReport> drifted_rows(const std::string& exp, const DriftedConfig& c,
                                             const std::vector<DriftedRecord>& recs) {
  const MartingaleSpec m{mart::HitprobDrifted{c.mart_level, c.mu, c.sigma}};
  const double m0 = drifted_m0(c);
  auto mr = column(recs, [&](const DriftedRecord& r) { return m.value(r.min_x, 0.0, r.tb_before_rho); });
  auto ml = column(recs, [&](const DriftedRecord& r) {
    return r.l_seen ? m.value(c.level, 0.0, r.tb_before_l) : m0;
  });
  const MCEstimate le = mc_mean(ml, c.prune_eps);
  auto trunc = column(recs, [](const DriftedRecord& r) { return r.truncated ? 1.0 : 0.0; });
  return {agree_row(exp, "drifted_ept", mc_mean(mr, c.prune_eps), m0),
          agree_row(exp, "drifted_ml_neg_control", le, drifted_ml_target(c)),
          differ_row(exp, "drifted_ml_differs", le, m0),
          info_row(exp, "drifted_truncated", mc_mean(trunc), 0.0)};
}

inline std::vector<CheckReport> ghorizon_rows(const std::string& exp,
                                              const std::vector<GHorizonRecord>& recs,
                                              const std::vector<double>& lambdas) {
  std::vector<CheckReport> out;
  for (double l : lambdas) {
    const std::string sfx = "_exp_" + num_id(l);
    auto mr = column(recs, [&](const GHorizonRecord& r) { return exp_martingale(l, r.b_rho, r.rho); });
    out.push_back(agree_row(exp, "ghorizon_ept" + sfx, mc_mean(mr), 1.0));
    auto mg = column(recs, [&](const GHorizonRecord& r) { return exp_martingale(l, 0.0, r.g_time); });
    const MCEstimate ge = mc_mean(mg);
    out.push_back(agree_row(exp, "ghorizon_mg_neg_control" + sfx, ge, arcsine_laplace(0.5 * l * l)));
    out.push_back(differ_row(exp, "ghorizon_mg_differs" + sfx, ge, 1.0));
  }
  return out;
}

inline std::vector<CheckReport> silly_rows(const std::string& exp,
                                           const std::vector<SillyRecord>& recs,
                                           const std::vector<double>& lambdas) {
  std::vector<CheckReport> out;
  for (double l : lambdas) {
    auto m = column(recs, [&](const SillyRecord& r) { return exp_martingale(l, r.b_rho, r.rho); });
    out.push_back(agree_row(exp, "silly_ept_exp_" + num_id(l), mc_mean(m), 1.0));
  }
  return out;
}

}  // namespace pst
