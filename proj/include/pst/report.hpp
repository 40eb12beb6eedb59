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

// Check rows and their CSV rendering.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pst/stats.hpp"

namespace pst {

enum class Verdict { pass, fail, info };

inline const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::info: return "info";
  }
  return "info";
}

struct CheckReport {
  std::string experiment;
  std::string check_id;
  std::optional<double> estimate;
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<double> se;
  std::optional<double> n;
  std::optional<double> bias_bound;
  std::optional<double> target;
  Verdict verdict = Verdict::info;
  std::optional<double> wall_time_s;
  std::string lo_rational;
  std::string hi_rational;

  bool gating() const noexcept { return verdict != Verdict::info; }
  bool passed() const noexcept { return verdict != Verdict::fail; }
};

inline Verdict verdict_of(bool ok) noexcept { return ok ? Verdict::pass : Verdict::fail; }

// Row for an estimate compared against a target by the agreement rule.
inline CheckReport agree_row(std::string exp, std::string id, const MCEstimate& e,
                             double target) {
  CheckReport r;
  r.experiment = std::move(exp);
  r.check_id = std::move(id);
  r.estimate = e.mean;
  r.se = e.se;
  r.n = static_cast<double>(e.n);
  r.bias_bound = e.bias_bound;
  r.target = target;
  r.verdict = verdict_of(agrees(e, target));
  return r;
}

// Row asserting the estimate is separated from `target`.
inline CheckReport differ_row(std::string exp, std::string id, const MCEstimate& e,
                              double target) {
  CheckReport r = agree_row(std::move(exp), std::move(id), e, target);
  r.verdict = verdict_of(differs(e, target));
  return r;
}

inline CheckReport info_row(std::string exp, std::string id, const MCEstimate& e,
                            std::optional<double> target = std::nullopt) {
  CheckReport r = agree_row(std::move(exp), std::move(id), e, target.value_or(0.0));
  r.target = target;
  r.verdict = Verdict::info;
  return r;
}

inline constexpr double kKsThreshold = 0.001;

// KS rows report the p-value as the estimate and the threshold as target.
inline CheckReport ks_row(std::string exp, std::string id, const KSResult& ks) {
  CheckReport r;
  r.experiment = std::move(exp);
  r.check_id = std::move(id);
  r.estimate = ks.p_value;
  r.lo = ks.d_stat;
  r.n = static_cast<double>(ks.m == 0 ? ks.n : ks.n + ks.m);
  r.target = kKsThreshold;
  r.verdict = verdict_of(ks.p_value >= kKsThreshold);
  return r;
}

inline std::string format_real(std::optional<double> v) {
  if (!v) return "";
  if (std::isnan(*v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", *v);
  return buf;
}

inline const char* kCsvHeader =
    "experiment,check_id,estimate,lo,hi,stderr,n,bias_bound,target,pass,"
    "wall_time_s,lo_rational,hi_rational";

inline void write_csv(std::ostream& os, const std::vector<CheckReport>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.experiment << ',' << r.check_id << ',' << format_real(r.estimate) << ','
       << format_real(r.lo) << ',' << format_real(r.hi) << ',' << format_real(r.se)
       << ',' << format_real(r.n) << ',' << format_real(r.bias_bound) << ','
       << format_real(r.target) << ',' << to_string(r.verdict) << ','
       << format_real(r.wall_time_s) << ',' << r.lo_rational << ',' << r.hi_rational
       << '\n';
  }
}

inline bool all_passed(const std::vector<CheckReport>& rows) noexcept {
  for (const auto& r : rows)
    if (!r.passed()) return false;
  return true;
}

}  // namespace pst
