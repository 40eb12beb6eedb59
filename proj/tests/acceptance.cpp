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

// Acceptance run: every criterion at the default budget, one line each.
// The full report goes to acceptance.csv in the working directory.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pst/lab.hpp"

namespace {

using pst::CheckReport;

struct Criterion {
  int number;
  std::string title;
  std::function<bool(const CheckReport&)> select;
  std::optional<double> time_limit_s;
};

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

std::function<bool(const CheckReport&)> rows_in(
    std::map<std::string, std::vector<std::string>> wanted) {
  return [wanted](const CheckReport& r) {
    const auto it = wanted.find(r.experiment);
    if (it == wanted.end()) return false;
    for (const auto& p : it->second)
      if (p.back() == '*' ? starts_with(r.check_id, p.substr(0, p.size() - 1)) : r.check_id == p)
        return true;
    return false;
  };
}

}  // namespace

int main() {
  pst::ExperimentConfig cfg;  // default budget
  pst::Lab lab(cfg);
  std::vector<CheckReport> rows;
  std::map<std::string, double> seconds;
  for (const auto& id : pst::registry()) {
    const auto t0 = std::chrono::steady_clock::now();
    auto part = lab.run(id);
    seconds[id] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "  ran %-18s %4zu rows  %7.1f s\n", id.c_str(), part.size(), seconds[id]);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  {
    std::ofstream out("acceptance.csv");
    pst::write_csv(out, rows);
  }

  const std::vector<Criterion> criteria = {
      {1, "Williams rho, E[M_rho] = 1", rows_in({{"williams", {"ept_exp_*"}}}), {}},
      {2, "honest time sigma, E[M_sigma] closed form and != 1",
       rows_in({{"sigma-negative", {"esigma_neg_control", "esigma_differs_from_one"}}}), {}},
      {3, "non-H1 control E[B_rho] = 1/2", rows_in({{"williams", {"linear_nonh1_*"}}}), {}},
      {4, "uniform S_rho and BES(3) Z_rho",
       rows_in({{"williams", {"srho_uniform_ks"}}, {"bessel", {"bessel_zrho_uniform_ks"}}}), {}},
      {5, "terminaval and conditional pair at lambda 1",
       rows_in({{"terminaval", {"tv_indicator_half_exp_1"}},
                {"conditional", {"cond_minf_indicator_half_exp_1", "cond_falsify_exp_1"}}}),
       {}},
      {6, "master formula",
       rows_in({{"masterformula", {"mf_y_lhs", "mf_y_rhs", "mf_y_diff", "mf_exp_lhs",
                                   "mf_exp_rhs", "mf_exp_diff"}}}),
       {}},
      {7, "BES(3), drifted and g-horizon constructions",
       rows_in({{"bessel", {"bessel_ept"}},
                {"drifted", {"drifted_ept"}},
                {"g-horizon", {"ghorizon_ept_*"}}}),
       {}},
      {8, "Delta constructions",
       rows_in({{"delta-exp-lambda", {"dl_exponential_ks"}},
                {"delta-exp-S", {"ds_ept_exp_*", "ds_survival_0.25", "ds_survival_1",
                                 "ds_survival_4"}}}),
       {}},
      {9, "Cox time and the (H) discriminator",
       rows_in({{"cox", {"cox_ept_exp_*"}},
                {"h-projection",
                 {"hproj_cox_t0.25_exp_1", "hproj_cox_t1_exp_1", "hproj_williams_any_exp_1"}}}),
       {}},
      {10, "rho ^ T_a, silly time, T_S family, rho law",
       rows_in({{"min-with-stopping", {"mws_*"}},
                {"silly", {"silly_ept_*"}},
                {"t-s-family", {"ts_ept_*", "ts_degenerate_*"}},
                {"rho-law-ks", {"rho_law_ks"}}}),
       {}},
      {11, "enlarged-filtration ratio increases",
       rows_in({{"enlarged-monotone", {"enlarged_increase_fraction"}}}), {}},
      {12, "coin oracle (exact)", rows_in({{"coin", {"*"}}}), 120.0},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    int total = 0;
    int bad = 0;
    std::string first_bad;
    for (const auto& r : rows) {
      if (!c.select(r) || !r.gating()) continue;
      ++total;
      if (!r.passed()) {
        if (bad++ == 0) first_bad = r.experiment + "/" + r.check_id;
      }
    }
    bool ok = total > 0 && bad == 0;
    std::string note;
    if (c.time_limit_s && seconds["coin"] > *c.time_limit_s) {
      ok = false;
      note = " (over time limit)";
    }
    if (!ok) ++failed;
    std::printf("criterion %2d %s: %d/%d rows pass%s%s%s\n", c.number, ok ? "PASS" : "FAIL",
                total - bad, total, note.c_str(), first_bad.empty() ? "" : ", first failure ",
                first_bad.c_str());
    std::printf("             %s\n", c.title.c_str());
  }

  std::printf("\ndiagnostics (not gating):\n");
  for (const auto& r : rows) {
    if (r.gating()) continue;
    if (r.experiment != "delta-exp-S" && r.experiment != "delta-exp-lambda" &&
        r.experiment != "h-projection")
      continue;
    std::printf("  %-18s %-26s estimate %-14s stderr %-12s target %s\n", r.experiment.c_str(),
                r.check_id.c_str(), pst::format_real(r.estimate).c_str(),
                pst::format_real(r.se).c_str(), pst::format_real(r.target).c_str());
  }
  std::printf("\n%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
