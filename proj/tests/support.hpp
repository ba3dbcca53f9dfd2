// Copyright 2026 The Fisherkit Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared test utilities: seeded generators for curves, markets, games and
// prices, plus the independent brute-force oracles the suites check the
// library against. Everything here is deterministic under a fixed seed.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fisher/demand.hpp"
#include "fisher/games.hpp"
#include "fisher/market.hpp"

namespace fishertest {

using fisher::Allocation;
using fisher::BimatrixGame;
using fisher::Bundle;
using fisher::Market;
using fisher::MixedProfile;
using fisher::PlcCurve;
using fisher::PriceVector;
using fisher::Rat;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  long uniform(long lo, long hi) {  // inclusive
    return std::uniform_int_distribution<long>(lo, hi)(eng_);
  }
  bool chance(int num, int den) { return uniform(1, den) <= num; }

  // Rational with numerator in [lo_num, hi_num] and denominator in [1, max_den].
  Rat rat(long lo_num, long hi_num, long max_den) {
    return Rat(uniform(lo_num, hi_num), uniform(1, max_den));
  }
  // Strictly positive rational bounded away from zero.
  Rat positive_rat(long hi_num, long max_den) {
    return Rat(uniform(1, hi_num), uniform(1, max_den));
  }
  // k / 2^pow style value in (0, hi].
  Rat dyadic(long hi_times_den, long den) {
    return Rat(uniform(1, hi_times_den), den);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Random valid curve with at most max_segments segments. Slopes are small
// integers built strictly decreasing; breakpoints land on the 1/8 grid.
// force_monotone keeps the last slope positive.
inline PlcCurve random_curve(Rng& rng, int max_segments, bool force_monotone) {
  int segs = static_cast<int>(rng.uniform(1, max_segments));
  std::vector<long> levels;
  long cur = rng.uniform(force_monotone ? 1 : 0, 4);  // final slope
  levels.push_back(cur);
  for (int s = 1; s < segs; ++s) {
    cur += rng.uniform(1, 6);
    levels.push_back(cur);
  }
  std::vector<Rat> slopes;
  for (int s = segs - 1; s >= 0; --s) slopes.push_back(Rat(levels[s]));
  std::vector<Rat> breaks;
  Rat acc(0);
  for (int s = 1; s < segs; ++s) {
    acc += rng.dyadic(16, 8);  // step in (0, 2] on the 1/8 grid
    breaks.push_back(acc);
  }
  return PlcCurve(std::move(slopes), std::move(breaks));
}

struct MarketGenOptions {
  int max_buyers = 3;
  int max_goods = 3;
  int max_segments = 2;
  bool monotone_bias = true;   // most curves strictly monotone
  bool dyadic = true;          // money/supply on the 1/8 grid
};

inline Market random_market(Rng& rng, const MarketGenOptions& opt) {
  Market m;
  int ng = static_cast<int>(rng.uniform(1, opt.max_goods));
  int nb = static_cast<int>(rng.uniform(1, opt.max_buyers));
  for (int j = 0; j < ng; ++j) {
    Rat supply = opt.dyadic ? Rat(rng.uniform(8, 16), 8)   // [1, 2]
                            : rng.positive_rat(5, 4);
    m.goods.push_back(fisher::Good{supply});
  }
  for (int i = 0; i < nb; ++i) {
    fisher::Buyer b;
    b.money = opt.dyadic ? Rat(rng.uniform(4, 24), 8)      // [1/2, 3]
                         : rng.positive_rat(6, 3);
    b.label = "B" + std::to_string(i);
    for (int j = 0; j < ng; ++j) {
      if (ng > 1 && rng.chance(1, 4)) continue;  // leave some goods unvalued
      bool monotone = !opt.monotone_bias || rng.chance(4, 5);
      PlcCurve c = random_curve(rng, opt.max_segments, monotone);
      if (!c.is_zero()) b.valuations.emplace(j, c);
    }
    if (b.valuations.empty()) {
      b.valuations.emplace(0, PlcCurve::linear(Rat(1)));
    }
    m.buyers.push_back(std::move(b));
  }
  return m;
}

inline PriceVector random_positive_prices(Rng& rng, int n) {
  PriceVector p;
  for (int j = 0; j < n; ++j) p.push_back(rng.positive_rat(8, 5));
  return p;
}

// Prices restricted to powers of two; keeps grid oracles exact.
inline PriceVector random_pow2_prices(Rng& rng, int n) {
  static const long kNum[] = {1, 1, 1, 2, 4};
  static const long kDen[] = {4, 2, 1, 1, 1};
  PriceVector p;
  for (int j = 0; j < n; ++j) {
    long k = rng.uniform(0, 4);
    p.push_back(Rat(kNum[k], kDen[k]));
  }
  return p;
}

// Random sparse normalized game on the 1/8 grid, with occasional hard -1/+1
// entries. Sizes n <= 6 keep rows/columns under the sparsity cap by
// construction, and extra zeros are sprinkled in anyway.
inline BimatrixGame random_sparse_game(Rng& rng, int n) {
  BimatrixGame g;
  auto entry = [&]() -> Rat {
    if (rng.chance(1, 3)) return Rat(0);
    if (rng.chance(1, 8)) return rng.chance(1, 2) ? Rat(1) : Rat(-1);
    return Rat(rng.uniform(-8, 8), 8);
  };
  g.A.assign(n, std::vector<Rat>(n, Rat(0)));
  g.B.assign(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g.A[i][j] = entry();
      g.B[i][j] = entry();
    }
  }
  return g;
}

// Random point of the budget simplex: spends a random fraction of the budget
// across the goods in random proportions. Exact rationals throughout.
inline Bundle random_feasible_bundle(Rng& rng, const Market& m, int i,
                                     const PriceVector& p) {
  const int ng = m.num_goods();
  Bundle a(ng, Rat(0));
  std::vector<long> weights(ng);
  long total = 0;
  for (int j = 0; j < ng; ++j) {
    weights[j] = rng.uniform(0, 16);
    total += weights[j];
  }
  if (total == 0) return a;
  Rat budget = m.buyers[i].money * Rat(rng.uniform(0, 64), 64);
  for (int j = 0; j < ng; ++j) {
    if (weights[j] == 0 || p[j].is_zero()) continue;
    Rat spend = budget * Rat(weights[j], total);
    a[j] = spend / p[j];
  }
  return a;
}

// Brute-force utility maximum over the budget simplex at a fixed money
// step: every way of splitting the budget into `steps` equal money chunks
// across the goods. Independent of the demand module; used to confirm its
// optima from below (the grid maximum can trail the true optimum by at most
// goods * (w/steps) * best_ratio).
inline Rat grid_simplex_max_utility(const Market& m, int i,
                                    const PriceVector& p, int steps) {
  const int ng = m.num_goods();
  const Rat& w = m.buyers[i].money;
  Rat best(0);
  std::vector<int> chunk(ng, 0);
  // Enumerate compositions of `steps` into ng nonnegative parts.
  std::vector<int> stack;
  std::function<void(int, int)> rec = [&](int j, int left) {
    if (j == ng - 1) {
      chunk[j] = left;
      Bundle a(ng, Rat(0));
      bool ok = true;
      for (int k = 0; k < ng && ok; ++k) {
        if (chunk[k] == 0) continue;
        if (p[k].is_zero()) {
          ok = false;  // cannot spend money on a free good
        } else {
          a[k] = w * Rat(chunk[k], steps) / p[k];
        }
      }
      if (ok) {
        Rat u = fisher::utility(m, i, a);
        if (u > best) best = u;
      }
      return;
    }
    for (int take = 0; take <= left; ++take) {
      chunk[j] = take;
      rec(j + 1, left - take);
    }
  };
  rec(0, steps);
  return best;
}

}  // namespace fishertest
