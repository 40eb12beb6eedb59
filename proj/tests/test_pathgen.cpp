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

#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "pst/bridge.hpp"
#include "pst/parallel.hpp"
#include "pst/pathgen.hpp"
#include "pst/philox.hpp"
#include "pst/stats.hpp"
#include "pst/supermartingale.hpp"

namespace pst {
namespace {

// Known-answer vectors published with the Random123 reference code.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::apply({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                     {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(Philox, InterleavedMatchesSingle) {
  std::array<Philox4x32::Counter, 4> ctr{};
  for (std::uint32_t i = 0; i < 4; ++i) ctr[i] = {i * 7, i, 3, 9};
  const auto many = Philox4x32::apply_n(ctr, {11, 13});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(many[i], Philox4x32::apply(ctr[i], {11, 13}));
}

TEST(CounterStream, RandomAccessIsOrderIndependent) {
  CounterStream a({7, 3});
  CounterStream b({7, 3});
  std::vector<double> forward;
  for (std::uint64_t k = 1; k <= 40; ++k) forward.push_back(a.normal(k));
  for (std::uint64_t k = 40; k >= 1; --k) EXPECT_EQ(b.normal(k), forward[k - 1]);
}

TEST(CounterStream, KeysSeparateStreams) {
  CounterStream a({7, 0});
  CounterStream b({7, 1});
  CounterStream c({8, 0});
  EXPECT_NE(a.normal(1), b.normal(1));
  EXPECT_NE(CounterStream({7, 0}).normal(1), c.normal(1));
  EXPECT_NE(a.aux_uniform(0), a.aux_uniform(1));
}

TEST(CounterStream, OpenUnitNeverHitsEndpoints) {
  EXPECT_GT(CounterStream::to_open_unit(0), 0.0);
  EXPECT_LT(CounterStream::to_open_unit(~std::uint64_t{0}), 1.0);
}

TEST(CounterStream, NormalsHaveUnitMoments) {
  CounterStream rs({42, 0});
  std::vector<double> v;
  std::vector<double> sq;
  for (std::uint64_t k = 1; k <= 200000; ++k) {
    const double g = rs.normal(k);
    v.push_back(g);
    sq.push_back(g * g);
  }
  EXPECT_TRUE(agrees(mc_mean(v), 0.0));
  EXPECT_TRUE(agrees(mc_mean(sq), 1.0));
  const auto ks = ks_one_sample(v, [](double x) { return normal_cdf(x); });
  EXPECT_GE(ks.p_value, 0.001);
}

TEST(TimeGrid, TimesAreIndexTimesDt) {
  const TimeGrid g(1e-3, 1000000);
  EXPECT_EQ(g.time(123456), 123456 * 1e-3);
  EXPECT_EQ(g.at(7).index, 7u);
  EXPECT_EQ(g.snap(0.25), 250u);
  EXPECT_EQ(g.horizon(), 1000.0);
}

TEST(TimeGrid, RejectsBadParameters) {
  EXPECT_THROW(TimeGrid(0.0, 10), ConfigError);
  EXPECT_THROW(TimeGrid(-1.0, 10), ConfigError);
  EXPECT_THROW(TimeGrid(1.0, 0), ConfigError);
  EXPECT_THROW(TimeGrid(1.0, kMaxSteps + 1), ConfigError);
}

TEST(Advance, BrownianStepUsesTheStreamNormal) {
  const TimeGrid g(0.01, 10);
  const PathCursor c = advance(make_cursor(Brownian{}), g, StreamKey{5, 2});
  CounterStream rs({5, 2});
  const double expect = std::sqrt(0.01) * rs.normal(1);
  EXPECT_EQ(c.value, expect);
  EXPECT_EQ(c.running_max, std::max(0.0, expect));
  EXPECT_EQ(c.step_index, 1u);
}

TEST(Advance, BesselStepIsTheNormOfThreeCoordinates) {
  const TimeGrid g(0.04, 10);
  const double g1 = 0.3;
  const double g2 = -1.1;
  const double g3 = 0.7;
  const PathCursor c =
      advance_with(make_cursor(Bessel{3, 1.0}), g, Increment{g1, g2 * g2 + g3 * g3});
  const double sq = std::sqrt(0.04);
  EXPECT_NEAR(c.value, std::hypot(1.0 + sq * g1, sq * g2, sq * g3), 1e-15);
}

TEST(Advance, DriftedZeroNoiseMovesByDrift) {
  const TimeGrid g(1e-3, 10);
  const PathCursor c = advance_with(make_cursor(Drifted{0.0, -1.0, 1.0}), g, Increment{});
  EXPECT_DOUBLE_EQ(c.value, -1e-3);
}

TEST(Advance, TruncationIsAFlag) {
  const TimeGrid g(0.1, 2);
  CounterStream rs({1, 1});
  PathCursor c = make_cursor(Brownian{});
  c = advance(c, g, rs);
  EXPECT_FALSE(c.truncated);
  c = advance(c, g, rs);
  EXPECT_TRUE(c.truncated);
  EXPECT_THROW(advance(c, g, rs), std::logic_error);
}

TEST(Advance, RejectsInvalidProcesses) {
  EXPECT_THROW(make_cursor(Bessel{2, 1.0}), ConfigError);
  EXPECT_THROW(make_cursor(Bessel{3, -1.0}), ConfigError);
  EXPECT_THROW(make_cursor(Drifted{0.0, -1.0, 0.0}), ConfigError);
}

TEST(Advance, CursorInvariantsHoldAlongPaths) {
  const TimeGrid g(1e-2, 5000);
  for (const ProcessKind kind : {ProcessKind{Brownian{}}, ProcessKind{Bessel{4, 0.5}},
                                 ProcessKind{Drifted{0.2, -1.0, 2.0}}}) {
    CounterStream rs({3, 0});
    PathCursor c = make_cursor(kind);
    double prev_max = c.running_max;
    double true_max = c.value;
    while (!c.truncated) {
      c = advance(c, g, rs);
      true_max = std::max(true_max, c.value);
      ASSERT_GE(c.running_max, prev_max);
      ASSERT_EQ(c.running_max, true_max);
      ASSERT_LE(c.last_max_attain_index, c.step_index);
      if (std::holds_alternative<Bessel>(kind)) {
        ASSERT_GE(c.value, 0.0);
      }
      prev_max = c.running_max;
    }
  }
}

TEST(FirstHit, HandTraces) {
  const TimeGrid g(1.0, 10);
  const std::vector<double> up{0, 0.4, 0.8, 1.0};
  const HitResult h = first_hit(up, 1.0, Direction::up, g);
  ASSERT_TRUE(h.time);
  EXPECT_EQ(h.time->index, 3u);
  const std::vector<double> miss{0, -0.2};
  const HitResult m = first_hit(miss, 1.0, Direction::up, TimeGrid(1.0, 2));
  EXPECT_FALSE(m.time);
  EXPECT_TRUE(m.truncated);
  const std::vector<double> down{0.5, 0.1, -0.3};
  EXPECT_EQ(first_hit(down, 0.0, Direction::down, g).time->index, 2u);
}

// T_1 has the law of 1 / N^2; compared with a direct sampler, both capped
// at the horizon.
TEST(FirstHit, BrownianHittingTimeMatchesInverseSquareNormal) {
  const TimeGrid g(1e-3, 50000);
  const std::size_t n = 1500;
  auto sim = parallel_map(n, default_workers(), [&](std::size_t i) {
    CounterStream rs({101, i});
    PathCursor c = make_cursor(Brownian{});
    const HitResult h = first_hit(c, g, rs, 1.0, Direction::up);
    return h.time ? h.time->time : g.horizon();
  });
  std::vector<double> ref(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = CounterStream({202, i}).aux_normal(0);
    ref[i] = std::min(1.0 / (z * z), g.horizon());
  }
  EXPECT_GE(ks_two_sample(sim, ref).p_value, 0.001);
}

// P[T_1 > t_max] = erf(1 / sqrt(2 t_max)); binomial three-sigma band.
TEST(FirstHit, TruncationRateMatchesReflectionPrinciple) {
  const TimeGrid g(1e-3, 1000);
  const std::size_t n = 4000;
  auto trunc = parallel_map(n, default_workers(), [&](std::size_t i) {
    CounterStream rs({303, i});
    PathCursor c = make_cursor(Brownian{});
    return first_hit(c, g, rs, 1.0, Direction::up).truncated ? 1.0 : 0.0;
  });
  const double p = hitting_survival(g.horizon());
  EXPECT_NEAR(p, 0.682689492137, 1e-12);
  EXPECT_TRUE(agrees(mc_mean(trunc), p));
}

// With r0 = 0, R_t^2 / t is chi-square with n degrees of freedom.
TEST(Bessel, SquaredRadiusIsChiSquare) {
  const TimeGrid g(0.02, 50);
  for (int dim : {3, 4, 5}) {
    std::vector<double> v;
    for (std::size_t i = 0; i < 3000; ++i) {
      CounterStream rs({404 + static_cast<std::uint64_t>(dim), i});
      PathCursor c = make_cursor(Bessel{dim, 0.0});
      while (!c.truncated) c = advance(c, g, rs);
      v.push_back(c.value * c.value / g.horizon());
    }
    const boost::math::chi_squared chi(dim);
    const auto ks = ks_one_sample(v, [&](double x) { return x <= 0 ? 0.0 : cdf(chi, x); });
    EXPECT_GE(ks.p_value, 0.001) << "dim " << dim;
  }
}

TEST(Bridge, CrossingProbabilityFormula) {
  EXPECT_EQ(crossing_probability(0.1, -0.2, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(crossing_probability(0.3, 0.5, 0.2), std::exp(-2.0 * 0.15 / 0.2));
  EXPECT_EQ(crossing_probability(0.3, 0.5, 0.0), 0.0);
  EXPECT_FALSE(may_cross(5.0, 5.0, 1.0));
  EXPECT_TRUE(may_cross(0.1, 0.1, 1.0));
}

TEST(Bridge, MaximumLawMatchesReflection) {
  // P[max >= m] = exp(-2 (m - x0)(m - x1) / var); check by inversion.
  const double x0 = 0.2;
  const double x1 = -0.1;
  const double var = 0.5;
  for (double u : {0.9, 0.5, 0.1, 0.01}) {
    const double m = bridge_max(x0, x1, var, u);
    EXPECT_GE(m, std::max(x0, x1));
    EXPECT_NEAR(std::exp(-2.0 * (m - x0) * (m - x1) / var), u, 1e-12);
    const double lo = bridge_min(x0, x1, var, u);
    EXPECT_LE(lo, std::min(x0, x1));
    EXPECT_NEAR(std::exp(-2.0 * (x0 - lo) * (x1 - lo) / var), u, 1e-12);
  }
  EXPECT_DOUBLE_EQ(bridge_max(x0, x1, var, 1.0), x0);
}

TEST(Bridge, MonitoringWithoutDrawsIsGridMonitoring) {
  Segment s{1, 0.0, 1.0, 0.2, 0.4, 1.0};
  SegmentDraws none;
  EXPECT_DOUBLE_EQ(segment_max(s, none, 10.0), 0.4);
  EXPECT_DOUBLE_EQ(segment_min(s, none, -10.0), 0.2);
}

}  // namespace
}  // namespace pst
