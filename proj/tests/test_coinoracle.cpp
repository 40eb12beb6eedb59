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

#include <bit>
#include <vector>

#include <gtest/gtest.h>

#include "pst/coin.hpp"

namespace pst::coin {
namespace {

BigRational q(long n, long d) {
  BigRational r(n, d);
  r.canonicalize();
  return r;
}

TEST(Decompose, HandTraces) {
  EXPECT_EQ(decompose_word({+1, -1, +1, +1}, 2), (Decomposition{4, 2, 1, 1}));
  EXPECT_EQ(decompose_word({+1, +1}, 2), (Decomposition{2, 0, 0, 0}));
  EXPECT_EQ(decompose_word({+1, +1, -1, -1, +1, +1, +1}, 3), (Decomposition{7, 4, 2, 2}));
}

TEST(Decompose, StopsAtFirstPassage) {
  // Steps after sigma_p are ignored.
  EXPECT_EQ(decompose_word({+1, +1, -1, -1}, 2), (Decomposition{2, 0, 0, 0}));
}

TEST(Decompose, NeverHits) {
  EXPECT_THROW(decompose_word({-1, +1, -1}, 1), NeverHits);
  EXPECT_THROW(decompose_word({}, 1), NeverHits);
}

TEST(Enumerate, SmallCases) {
  std::vector<std::pair<PathWord, BigRational>> seen;
  const auto collect = [&](const PathWord& w, const BigRational& wt) { seen.push_back({w, wt}); };
  BigRational tail = enumerate_sigma_p(2, 2, collect);
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0].first, (PathWord{+1, +1}));
  EXPECT_EQ(seen[0].second, q(1, 4));
  EXPECT_EQ(tail, q(3, 4));

  seen.clear();
  tail = enumerate_sigma_p(1, 1, collect);
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0].second, q(1, 2));
  EXPECT_EQ(tail, q(1, 2));
}

TEST(Enumerate, MassIsConserved) {
  for (int p = 1; p <= 4; ++p)
    for (int K = 1; K <= 14; ++K) {
      BigRational mass = 0;
      const BigRational tail =
          enumerate_sigma_p(p, K, [&](const PathWord&, const BigRational& wt) { mass += wt; });
      EXPECT_EQ(mass + tail, 1) << p << " " << K;
    }
}

TEST(Enumerate, BudgetLimits) {
  EXPECT_THROW(tail_mass(6, 10), BudgetExceeded);
  EXPECT_THROW(tail_mass(2, 25), BudgetExceeded);
  EXPECT_THROW(tail_mass(0, 10), BudgetExceeded);
}

TEST(Enumerate, DecompositionInvariantsHoldForEveryWord) {
  for (int p : {1, 2, 3, 4}) {
    enumerate_sigma_p(p, 14, [&](const PathWord& w, const BigRational&) {
      const Decomposition d = decompose_word(w, p);
      std::vector<int> xs{0};
      for (int s : w) xs.push_back(xs.back() + s);
      ASSERT_LE(0, d.gamma);
      ASSERT_LE(d.gamma, d.eta);
      ASSERT_LE(d.eta, d.sigma_p);
      ASSERT_LE(0, d.m);
      ASSERT_LE(d.m, p - 1);
      ASSERT_EQ(xs[static_cast<std::size_t>(d.gamma)], d.m);
      ASSERT_EQ(xs[static_cast<std::size_t>(d.eta)], 0);
      ASSERT_EQ(xs[static_cast<std::size_t>(d.sigma_p)], p);
    });
  }
}

TEST(QChain, Examples) {
  EXPECT_EQ(q_prob({+1}), 1);
  EXPECT_EQ(q_prob({+1, +1}), 1);
  EXPECT_EQ(q_prob({+1, -1}), 0);
  EXPECT_EQ(q_prob({-1}), 0);
  EXPECT_EQ(q_prob({+1, +1, -1}), q(1, 4));
  EXPECT_EQ(q_prob({+1, +1, +1}), q(3, 4));
}

TEST(QChain, StoppedAtLevel) {
  EXPECT_EQ(q_prob_stopped({+1, +1, -1}, 2), 0);
  EXPECT_EQ(q_prob_stopped({+1, +1, -1}, 3), q(1, 4));
  EXPECT_EQ(q_prob_stopped({+1, +1}, 2), 1);
}

TEST(TerminalMartingale, Examples) {
  const TerminalMartingale f = first_step_up();
  EXPECT_EQ(f.initial(), q(1, 2));
  EXPECT_EQ(f.value({+1}, 1), 1);
  EXPECT_EQ(f.value({-1}, 1), 0);
  EXPECT_EQ(f.value({-1, +1, +1}, 3), 0);

  const TerminalMartingale c(3, std::vector<BigRational>(8, q(5, 7)));
  for (const auto& w : all_words(3)) EXPECT_EQ(c.value(w, w.size()), q(5, 7));

  // Terminal X_3 gives M_n = X_n.
  std::vector<BigRational> t(8);
  for (unsigned b = 0; b < 8; ++b) t[b] = 2 * std::popcount(b) - 3;
  const TerminalMartingale x(3, t);
  for (const auto& w : all_words(3)) {
    int s = 0;
    for (std::size_t n = 0; n <= w.size(); ++n) {
      EXPECT_EQ(x.value(w, n), s);
      if (n < w.size()) s += w[n];
    }
  }
}

TEST(TerminalMartingale, RejectsBadTables) {
  EXPECT_THROW(TerminalMartingale(2, {0, 1, 2}), ConfigError);
  EXPECT_THROW(TerminalMartingale(-1, {0}), ConfigError);
}

TEST(ExpectedAtGamma, FirstStepFixture) {
  const IntervalValue iv = expected_at_gamma(first_step_up(), 2, 16);
  EXPECT_TRUE(iv.contains(q(1, 2)));
  EXPECT_EQ(iv.hi - iv.lo, 2 * tail_mass(2, 16));
}

TEST(ExpectedAtGamma, ConstantTerminal) {
  const TerminalMartingale one(0, {1});
  const IntervalValue iv = expected_at_gamma(one, 2, 12);
  const BigRational tail = tail_mass(2, 12);
  EXPECT_EQ(iv.lo, 1 - 2 * tail);
  EXPECT_EQ(iv.hi, 1);
}

TEST(ExpectedAtGamma, RandomTerminals) {
  for (int p : {2, 3})
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const TerminalMartingale m = random_terminal(seed, 4);
      EXPECT_TRUE(expected_at_gamma(m, p, 16).contains(m.initial())) << p << " " << seed;
    }
}

TEST(ExpectedAtGamma, IntervalsNestAsKGrows) {
  const TerminalMartingale m = random_terminal(5, 3);
  for (int p : {2, 3}) {
    IntervalValue prev = expected_at_gamma(m, p, 8);
    for (int K = 10; K <= 16; K += 2) {
      const IntervalValue cur = expected_at_gamma(m, p, K);
      EXPECT_TRUE(cur.within(prev)) << p << " " << K;
      prev = cur;
    }
  }
}

TEST(MLaw, UniformOnLevels) {
  for (int p : {2, 3}) {
    const auto law = m_law(p, 16);
    ASSERT_EQ(law.size(), static_cast<std::size_t>(p));
    BigRational total = tail_mass(p, 16);
    for (const auto& iv : law) {
      EXPECT_TRUE(iv.contains(q(1, p)));
      total += iv.lo;
    }
    EXPECT_EQ(total, 1);
  }
}

TEST(MLaw, IntervalsNestAsKGrows) {
  for (int p : {2, 3}) {
    auto prev = m_law(p, 10);
    for (int K = 12; K <= 16; K += 2) {
      const auto cur = m_law(p, K);
      for (std::size_t j = 0; j < cur.size(); ++j) EXPECT_TRUE(cur[j].within(prev[j]));
      prev = cur;
    }
  }
}

TEST(PostEta, Examples) {
  EXPECT_TRUE(post_eta_law(2, 16, {+1}).contains(1));
  EXPECT_TRUE(post_eta_law(2, 16, {+1, +1}).contains(1));
  EXPECT_TRUE(post_eta_law(3, 18, {+1, +1, -1}).contains(q(1, 4)));
}

TEST(PostEta, AllShortWordsMatchTheChain) {
  for (int p : {2, 3})
    for (const auto& w : all_words(3))
      EXPECT_TRUE(post_eta_law(p, 16, w).contains(q_prob_stopped(w, p))) << word_text(w) << " p" << p;
}

TEST(Summary, AgreesWithSeparateOperations) {
  std::vector<TerminalMartingale> marts{first_step_up(), random_terminal(3, 4)};
  const auto prefixes = all_words(2);
  const CoinSummary s = summarize(3, 14, marts, prefixes);
  EXPECT_TRUE(s.invariants_hold);
  EXPECT_EQ(s.enumerated + s.tail, 1);
  const auto law = m_law(3, 14);
  for (std::size_t j = 0; j < law.size(); ++j) {
    EXPECT_EQ(s.m_law[j].lo, law[j].lo);
    EXPECT_EQ(s.m_law[j].hi, law[j].hi);
  }
  for (std::size_t i = 0; i < marts.size(); ++i) {
    const IntervalValue iv = expected_at_gamma(marts[i], 3, 14);
    EXPECT_EQ(s.gamma[i].lo, iv.lo);
    EXPECT_EQ(s.gamma[i].hi, iv.hi);
  }
  for (std::size_t i = 0; i < prefixes.size(); ++i)
    EXPECT_EQ(s.post_eta[i].lo, post_eta_law(3, 14, prefixes[i]).lo);
}

TEST(Summary, Deterministic) {
  std::vector<TerminalMartingale> marts{random_terminal(9, 4)};
  const CoinSummary a = summarize(2, 16, marts, all_words(3));
  const CoinSummary b = summarize(2, 16, marts, all_words(3));
  EXPECT_EQ(a.gamma[0].lo, b.gamma[0].lo);
  EXPECT_EQ(a.gamma[0].hi, b.gamma[0].hi);
  EXPECT_EQ(to_text(a.tail), to_text(b.tail));
}

TEST(Text, Rendering) {
  EXPECT_EQ(to_text(q(3, 4)), "3/4");
  EXPECT_EQ(to_text(q(4, 2)), "2");
  EXPECT_EQ(word_text({+1, -1, +1}), "udu");
  EXPECT_EQ(all_words(3).size(), 14u);
}

}  // namespace
}  // namespace pst::coin
