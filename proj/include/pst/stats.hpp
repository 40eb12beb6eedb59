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

// Monte Carlo means and Kolmogorov-Smirnov tests.
//
// Sums use a fixed-shape pairwise reduction whose tree depends only on the
// sample count, so results are bit-identical however the samples were
// produced.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "pst/errors.hpp"

namespace pst {

inline double pairwise_sum(std::span<const double> v) noexcept {
  constexpr std::size_t kLeaf = 8;
  if (v.size() <= kLeaf) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct MCEstimate {
  double mean = 0.0;
  double se = 0.0;  // standard error
  std::size_t n = 0;
  double bias_bound = 0.0;
};

inline MCEstimate mc_mean(std::span<const double> v, double bias_bound = 0.0) {
  if (v.size() < 2) throw Empty("mc_mean needs at least two samples");
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - mean) * (v[i] - mean);
  const double var = pairwise_sum(dev) / (n - 1.0);
  return {mean, std::sqrt(var / n), v.size(), bias_bound};
}

// |mean - target| <= 3 stderr + bias_bound
inline bool agrees(const MCEstimate& e, double target) noexcept {
  return std::abs(e.mean - target) <= 3.0 * e.se + e.bias_bound;
}

// |mean - target| >= 5 stderr + bias_bound
inline bool differs(const MCEstimate& e, double target) noexcept {
  return std::abs(e.mean - target) >= 5.0 * e.se + e.bias_bound;
}

// Kolmogorov survival function Q(x) = P(K > x).
inline double kolmogorov_q(double x) noexcept {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // Theta-function form, fast for small x.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double j = 2.0 * k - 1.0;
      s += std::exp(-j * j * pi2 / (8.0 * x * x));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

inline double ks_p_value(double d, double n_eff) noexcept {
  const double sn = std::sqrt(n_eff);
  return kolmogorov_q(d * (sn + 0.12 + 0.11 / sn));
}

struct KSResult {
  double d_stat = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;  // second sample size; 0 for one-sample tests
  double p_value = 1.0;
};

inline constexpr std::size_t kMinKsSamples = 50;

inline KSResult ks_one_sample(std::vector<double> samples,
                              const std::function<double(double)>& cdf) {
  if (samples.size() < kMinKsSamples) throw TooFew("ks_one_sample needs n >= 50");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, samples.size(), 0, ks_p_value(d, n)};
}

inline KSResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < kMinKsSamples || b.size() < kMinKsSamples)
    throw TooFew("ks_two_sample needs n, m >= 50");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return {d, a.size(), b.size(), ks_p_value(d, n * m / (n + m))};
}

}  // namespace pst
