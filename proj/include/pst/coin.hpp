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

// Exact verification for the simple random walk: path decomposition at the
// last zero before the first passage at p, and E[M_gamma] = E[M_0] for
// bounded martingales, certified by truncated enumeration plus an exact tail.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "pst/errors.hpp"

namespace pst::coin {

using BigRational = mpq_class;
using PathWord = std::vector<int>;  // steps in {+1, -1}

inline constexpr int kMaxLevel = 5;
inline constexpr int kMaxHorizon = 24;

struct IntervalValue {
  BigRational lo;
  BigRational hi;

  bool contains(const BigRational& x) const { return lo <= x && x <= hi; }
  bool within(const IntervalValue& outer) const { return outer.lo <= lo && hi <= outer.hi; }
};

inline std::string to_text(const BigRational& q) { return q.get_str(); }

struct Decomposition {
  int sigma_p = 0;
  int eta = 0;
  int m = 0;
  int gamma = 0;

  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

inline Decomposition decompose_word(const PathWord& w, int p) {
  Decomposition d;
  int x = 0;
  int sigma = -1;
  std::vector<int> xs{0};
  for (std::size_t k = 0; k < w.size(); ++k) {
    x += w[k];
    xs.push_back(x);
    if (x == p) {
      sigma = static_cast<int>(k) + 1;
      break;
    }
  }
  if (sigma < 0) throw NeverHits("word never reaches level " + std::to_string(p));
  d.sigma_p = sigma;
  for (int k = 0; k <= sigma; ++k)
    if (xs[static_cast<std::size_t>(k)] == 0) d.eta = k;
  for (int k = 0; k <= d.eta; ++k) d.m = std::max(d.m, xs[static_cast<std::size_t>(k)]);
  while (xs[static_cast<std::size_t>(d.gamma)] != d.m) ++d.gamma;
  return d;
}

inline void check_budget(int p, int K) {
  if (p < 1 || p > kMaxLevel)
    throw BudgetExceeded("coin: p must lie in [1, " + std::to_string(kMaxLevel) + "]");
  if (K < 1 || K > kMaxHorizon)
    throw BudgetExceeded("coin: K must lie in [1, " + std::to_string(kMaxHorizon) + "]");
}

// P[sigma_p > K] by dynamic programming over positions of unabsorbed walks.
inline BigRational tail_mass(int p, int K) {
  check_budget(p, K);
  const int off = K;  // positions -K .. p-1
  std::vector<mpz_class> ways(static_cast<std::size_t>(off + p), 0);
  ways[static_cast<std::size_t>(off)] = 1;
  for (int step = 0; step < K; ++step) {
    std::vector<mpz_class> next(ways.size(), 0);
    for (std::size_t i = 0; i < ways.size(); ++i) {
      if (ways[i] == 0) continue;
      if (i + 1 < ways.size()) next[i + 1] += ways[i];  // reaching p absorbs
      if (i > 0) next[i - 1] += ways[i];
    }
    ways = std::move(next);
  }
  mpz_class total = 0;
  for (const auto& v : ways) total += v;
  BigRational q(total, mpz_class(1) << K);
  q.canonicalize();
  return q;
}

using WordVisitor = std::function<void(const PathWord&, const BigRational&)>;

// Visit every word that first reaches p within K steps with its probability
// 2^-length; returns the exact tail mass.
inline BigRational enumerate_sigma_p(int p, int K, const WordVisitor& visit) {
  check_budget(p, K);
  PathWord w;
  w.reserve(static_cast<std::size_t>(K));
  std::function<void(int)> dfs = [&](int x) {
    if (x == p) {
      BigRational weight(1, mpz_class(1) << static_cast<unsigned>(w.size()));
      weight.canonicalize();
      visit(w, weight);
      return;
    }
    if (static_cast<int>(w.size()) == K) return;
    for (int s : {+1, -1}) {
      w.push_back(s);
      dfs(x + s);
      w.pop_back();
    }
  };
  dfs(0);
  return tail_mass(p, K);
}

// Probability of the word under the chain started at 0 with up-probability
// (1 + 1/x) / 2 at x >= 1 and 1 at 0.
inline BigRational q_prob(const PathWord& w) {
  BigRational prob = 1;
  int x = 0;
  for (int s : w) {
    if (x == 0) {
      if (s != +1) return 0;
    } else {
      BigRational up(x + 1, 2 * x);
      up.canonicalize();
      prob *= s == +1 ? up : BigRational(1) - up;
    }
    x += s;
  }
  return prob;
}

// Same, for the chain stopped at its first passage at p: zero when the word
// would continue past that passage.
inline BigRational q_prob_stopped(const PathWord& w, int p) {
  int x = 0;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    x += w[k];
    if (x == p) return 0;
  }
  return q_prob(w);
}

// Martingale generated by a bounded terminal value on the first k steps:
// M_n = E[F | X_1..X_n], constant from n = k on. Terminal index bit i is set
// when step i+1 is up.
class TerminalMartingale {
 public:
  TerminalMartingale(int k, std::vector<BigRational> terminal) : k_(k) {
    if (k < 0 || k > 20) throw ConfigError("terminal martingale: k must lie in [0, 20]");
    if (terminal.size() != (std::size_t{1} << k))
      throw ConfigError("terminal martingale: table size must be 2^k");
    for (const auto& v : terminal)
      if (abs(v) > norm_) norm_ = abs(v);
    levels_.resize(static_cast<std::size_t>(k) + 1);
    levels_[static_cast<std::size_t>(k)] = std::move(terminal);
    for (int n = k - 1; n >= 0; --n) {
      const auto& up = levels_[static_cast<std::size_t>(n) + 1];
      auto& cur = levels_[static_cast<std::size_t>(n)];
      cur.resize(std::size_t{1} << n);
      for (std::size_t b = 0; b < cur.size(); ++b) {
        // child index: step n+1 appended as bit n
        cur[b] = (up[b] + up[b | (std::size_t{1} << n)]) / 2;
      }
    }
  }

  int horizon() const noexcept { return k_; }
  const BigRational& norm() const noexcept { return norm_; }
  const BigRational& initial() const { return levels_[0][0]; }

  // M_n on the prefix of w of length n.
  const BigRational& value(const PathWord& w, std::size_t n) const {
    const std::size_t len = std::min<std::size_t>(n, static_cast<std::size_t>(k_));
    std::size_t bits = 0;
    for (std::size_t i = 0; i < len; ++i)
      if (w[i] == +1) bits |= std::size_t{1} << i;
    return levels_[len][bits];
  }

 private:
  int k_;
  BigRational norm_ = 0;
  std::vector<std::vector<BigRational>> levels_;
};

// F = 1{X_1 = 1}
inline TerminalMartingale first_step_up() { return TerminalMartingale(1, {0, 1}); }

// Bounded terminal with entries n / 8, n uniform in [-8, 8].
inline TerminalMartingale random_terminal(std::uint64_t seed, int k) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> pick(-8, 8);
  std::vector<BigRational> t(std::size_t{1} << k);
  for (auto& v : t) {
    v = BigRational(pick(gen), 8);
    v.canonicalize();
  }
  return TerminalMartingale(k, std::move(t));
}

inline IntervalValue expected_at_gamma(const TerminalMartingale& mart, int p, int K) {
  BigRational sum = 0;
  const BigRational tail = enumerate_sigma_p(p, K, [&](const PathWord& w, const BigRational& wt) {
    sum += wt * mart.value(w, static_cast<std::size_t>(decompose_word(w, p).gamma));
  });
  const BigRational slack = mart.norm() * tail;
  return {sum - slack, sum + slack};
}

inline std::vector<IntervalValue> m_law(int p, int K) {
  std::vector<BigRational> mass(static_cast<std::size_t>(p), 0);
  const BigRational tail = enumerate_sigma_p(p, K, [&](const PathWord& w, const BigRational& wt) {
    mass[static_cast<std::size_t>(decompose_word(w, p).m)] += wt;
  });
  std::vector<IntervalValue> out;
  for (const auto& m : mass) out.push_back({m, m + tail});
  return out;
}

// Does the segment after eta start with `prefix`?
inline bool post_eta_starts_with(const PathWord& w, const Decomposition& d,
                                 const PathWord& prefix) {
  const std::size_t start = static_cast<std::size_t>(d.eta);
  if (start + prefix.size() > static_cast<std::size_t>(d.sigma_p)) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (w[start + i] != prefix[i]) return false;
  return true;
}

inline IntervalValue post_eta_law(int p, int K, const PathWord& prefix) {
  BigRational mass = 0;
  const BigRational tail = enumerate_sigma_p(p, K, [&](const PathWord& w, const BigRational& wt) {
    if (post_eta_starts_with(w, decompose_word(w, p), prefix)) mass += wt;
  });
  return {mass, mass + tail};
}

// Every +-1 word of length 1..max_len.
inline std::vector<PathWord> all_words(int max_len) {
  std::vector<PathWord> out;
  for (int len = 1; len <= max_len; ++len)
    for (unsigned bits = 0; bits < (1u << len); ++bits) {
      PathWord w;
      for (int i = 0; i < len; ++i) w.push_back((bits >> i) & 1u ? +1 : -1);
      out.push_back(std::move(w));
    }
  return out;
}

inline std::string word_text(const PathWord& w) {
  std::string s;
  for (int v : w) s += v > 0 ? 'u' : 'd';
  return s;
}

// All coin checks from one enumeration.
struct CoinSummary {
  BigRational enumerated;
  BigRational tail;
  std::vector<IntervalValue> m_law;
  std::vector<IntervalValue> gamma;  // one per martingale
  std::vector<IntervalValue> post_eta;  // one per prefix
  bool invariants_hold = true;
};

inline CoinSummary summarize(int p, int K, const std::vector<TerminalMartingale>& marts,
                             const std::vector<PathWord>& prefixes) {
  CoinSummary s;
  std::vector<BigRational> mass(static_cast<std::size_t>(p), 0);
  std::vector<BigRational> gam(marts.size(), 0);
  std::vector<BigRational> post(prefixes.size(), 0);
  s.enumerated = 0;
  s.tail = enumerate_sigma_p(p, K, [&](const PathWord& w, const BigRational& wt) {
    const Decomposition d = decompose_word(w, p);
    int x = 0;
    std::vector<int> xs{0};
    for (int v : w) xs.push_back(x += v);
    const auto at = [&](int k) { return xs[static_cast<std::size_t>(k)]; };
    if (!(0 <= d.gamma && d.gamma <= d.eta && d.eta <= d.sigma_p && 0 <= d.m && d.m <= p - 1 &&
          at(d.gamma) == d.m && at(d.eta) == 0 && at(d.sigma_p) == p))
      s.invariants_hold = false;
    s.enumerated += wt;
    mass[static_cast<std::size_t>(d.m)] += wt;
    for (std::size_t i = 0; i < marts.size(); ++i)
      gam[i] += wt * marts[i].value(w, static_cast<std::size_t>(d.gamma));
    for (std::size_t i = 0; i < prefixes.size(); ++i)
      if (post_eta_starts_with(w, d, prefixes[i])) post[i] += wt;
  });
  for (const auto& m : mass) s.m_law.push_back({m, m + s.tail});
  for (std::size_t i = 0; i < marts.size(); ++i) {
    const BigRational slack = marts[i].norm() * s.tail;
    s.gamma.push_back({gam[i] - slack, gam[i] + slack});
  }
  for (const auto& m : post) s.post_eta.push_back({m, m + s.tail});
  return s;
}

}  // namespace pst::coin
