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

#include "fisher/demand.hpp"

#include <gtest/gtest.h>

#include "fisher/reduction.hpp"
#include "support.hpp"

namespace fisher {
namespace {

using fishertest::grid_simplex_max_utility;

Market one_pair_market() { return build_price_regulating_market(1); }

// Random bundle drawn from a demand profile: mandatory plus a random spread
// of the leftover money over the tie edges, plus random free-good amounts.
Bundle bundle_from_profile(fishertest::Rng& rng, const DemandProfile& d,
                           const PriceVector& p) {
  Bundle a = d.mandatory;
  Rat money = d.leftover_money;
  std::vector<int> order(d.tie_edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::shuffle(order.begin(), order.end(), rng.engine());
  for (std::size_t t = 0; t < order.size() && money.sign() > 0; ++t) {
    const TieEdge& e = d.tie_edges[order[t]];
    Rat cap_money =
        e.capacity_units ? *e.capacity_units * p[e.good] : money;
    Rat spend = t + 1 == order.size()
                    ? min(money, cap_money)
                    : min(cap_money, money * Rat(rng.uniform(0, 16), 16));
    // The final edge takes whatever is left when it can; earlier edges take
    // random slices.
    a[e.good] += spend / p[e.good];
    money -= spend;
  }
  // Any residue goes to the first edge with room (capacity slack exists by
  // the profile invariant).
  for (const TieEdge& e : d.tie_edges) {
    if (money.sign() <= 0) break;
    if (!e.capacity_units) {
      a[e.good] += money / p[e.good];
      money = Rat(0);
      break;
    }
    Rat used = (a[e.good] - d.mandatory[e.good]) * p[e.good];
    Rat room = *e.capacity_units * p[e.good] - used;
    Rat spend = min(room, money);
    a[e.good] += spend / p[e.good];
    money -= spend;
  }
  EXPECT_TRUE(money.is_zero()) << "profile capacity could not absorb leftover";
  for (int j : d.free_goods) a[j] += Rat(rng.uniform(0, 8), 4);
  return a;
}

TEST(Demand, TieAtTopRatio) {
  Market m = one_pair_market();
  PriceVector p{Rat(1), Rat(2)};
  DemandProfile d = compute_demand(m, 0, p);
  EXPECT_EQ(d.mandatory, Bundle({Rat(0), Rat(0)}));
  ASSERT_TRUE(d.tie_ratio.has_value());
  EXPECT_EQ(*d.tie_ratio, Rat(2));
  ASSERT_EQ(d.tie_edges.size(), 2u);
  EXPECT_EQ(d.tie_edges[0].good, 0);
  EXPECT_FALSE(d.tie_edges[0].capacity_units.has_value());
  EXPECT_EQ(d.tie_edges[1].good, 1);
  ASSERT_TRUE(d.tie_edges[1].capacity_units.has_value());
  EXPECT_EQ(*d.tie_edges[1].capacity_units, Rat(1));
  EXPECT_EQ(d.leftover_money, Rat(3));
  EXPECT_FALSE(d.satiated);

  // Frozen optimum 6, confirmed from below by the simplex grid at step w/64.
  EXPECT_EQ(optimal_utility(m, 0, p), Rat(6));
  Rat grid = grid_simplex_max_utility(m, 0, p, 64);
  EXPECT_LE(grid, Rat(6));
  EXPECT_GE(grid, Rat(6) - Rat(2) * Rat(3, 64) * Rat(2));  // goods*step*ratio
}

TEST(Demand, MandatoryThenTie) {
  Market m = one_pair_market();
  PriceVector p{Rat(1), Rat(1)};
  DemandProfile d = compute_demand(m, 0, p);
  EXPECT_EQ(d.mandatory, Bundle({Rat(0), Rat(1)}));
  ASSERT_TRUE(d.tie_ratio.has_value());
  EXPECT_EQ(*d.tie_ratio, Rat(2));
  ASSERT_EQ(d.tie_edges.size(), 1u);
  EXPECT_EQ(d.tie_edges[0].good, 0);
  EXPECT_FALSE(d.tie_edges[0].capacity_units.has_value());
  EXPECT_EQ(d.leftover_money, Rat(2));
  EXPECT_FALSE(d.satiated);

  EXPECT_EQ(optimal_utility(m, 0, p), Rat(8));
  Rat grid = grid_simplex_max_utility(m, 0, p, 64);
  EXPECT_LE(grid, Rat(8));
  EXPECT_GE(grid, Rat(8) - Rat(2) * Rat(3, 64) * Rat(4));

  // The unique optimal bundle is (2, 1).
  EXPECT_TRUE(is_optimal_bundle(m, 0, p, {Rat(2), Rat(1)}).ok());
}

TEST(Demand, ZeroPriceOnMonotoneGoodIsUnbounded) {
  Market m = one_pair_market();
  EXPECT_THROW(compute_demand(m, 0, {Rat(0), Rat(1)}), UnboundedDemandError);
  try {
    compute_demand(m, 0, {Rat(0), Rat(1)});
  } catch (const UnboundedDemandError& e) {
    EXPECT_EQ(e.buyer(), 0);
    EXPECT_EQ(e.good(), 0);
  }
}

TEST(Demand, BoundaryExactlyAtSegmentEnd) {
  Market m = one_pair_market();
  PriceVector p{Rat(3), Rat(3)};
  DemandProfile d = compute_demand(m, 0, p);
  // Money 3 buys exactly the first segment of good 1; that segment is the
  // tie class, not a mandatory purchase.
  EXPECT_EQ(d.mandatory, Bundle({Rat(0), Rat(0)}));
  ASSERT_TRUE(d.tie_ratio.has_value());
  EXPECT_EQ(*d.tie_ratio, Rat(4, 3));
  ASSERT_EQ(d.tie_edges.size(), 1u);
  EXPECT_EQ(d.tie_edges[0].good, 1);
  EXPECT_EQ(d.leftover_money, Rat(3));
  EXPECT_EQ(optimal_utility(m, 0, p), Rat(4));
  Rat grid = grid_simplex_max_utility(m, 0, p, 64);
  EXPECT_LE(grid, Rat(4));
  EXPECT_GE(grid, Rat(4) - Rat(2) * Rat(3, 64) * Rat(4, 3));
}

TEST(Demand, IsOptimalBundleExamples) {
  Market m = one_pair_market();
  PriceVector p{Rat(1), Rat(2)};
  EXPECT_TRUE(is_optimal_bundle(m, 0, p, {Rat(1), Rat(1)}).ok());
  EXPECT_TRUE(is_optimal_bundle(m, 0, p, {Rat(3), Rat(0)}).ok());

  BundleCheck c = is_optimal_bundle(m, 0, {Rat(1), Rat(1)}, {Rat(1), Rat(1)});
  EXPECT_EQ(c.verdict, BundleVerdict::suboptimal);
  EXPECT_EQ(c.gap, Rat(2));  // utility 6 vs optimum 8

  c = is_optimal_bundle(m, 0, p, {Rat(4), Rat(0)});
  EXPECT_EQ(c.verdict, BundleVerdict::budget_violation);
  EXPECT_EQ(c.gap, Rat(1));
}

TEST(Demand, SatiatedBuyerKeepsSurplus) {
  Market m;
  m.goods.push_back(Good{Rat(2)});
  Buyer b;
  b.money = Rat(10);
  b.valuations.emplace(0, PlcCurve({Rat(5), Rat(0)}, {Rat(1)}));
  m.buyers.push_back(b);
  PriceVector p{Rat(5)};
  DemandProfile d = compute_demand(m, 0, p);
  EXPECT_EQ(d.mandatory, Bundle({Rat(1)}));
  EXPECT_TRUE(d.satiated);
  EXPECT_FALSE(d.tie_ratio.has_value());
  EXPECT_EQ(d.leftover_money, Rat(0));
  EXPECT_EQ(d.surplus, Rat(5));
  EXPECT_EQ(optimal_utility(m, 0, p), Rat(5));
  // Burning surplus on the zero-value tail stays optimal: cost 10, value 5.
  EXPECT_TRUE(is_optimal_bundle(m, 0, p, {Rat(2)}).ok());
}

TEST(Demand, ZeroPricedFinitePrefixIsMandatoryAndFree) {
  Market m;
  m.goods.push_back(Good{Rat(1)});
  m.goods.push_back(Good{Rat(1)});
  Buyer b;
  b.money = Rat(2);
  b.valuations.emplace(0, PlcCurve({Rat(3), Rat(0)}, {Rat(2)}));
  b.valuations.emplace(1, PlcCurve::linear(Rat(1)));
  m.buyers.push_back(b);
  PriceVector p{Rat(0), Rat(1)};
  DemandProfile d = compute_demand(m, 0, p);
  EXPECT_EQ(d.mandatory[0], Rat(2));  // free prefix, zero cost
  EXPECT_EQ(d.mandatory_cost, Rat(0));
  ASSERT_EQ(d.free_goods.size(), 1u);
  EXPECT_EQ(d.free_goods[0], 0);
  ASSERT_TRUE(d.tie_ratio.has_value());
  EXPECT_EQ(*d.tie_ratio, Rat(1));
  EXPECT_EQ(d.leftover_money, Rat(2));
  EXPECT_EQ(optimal_utility(m, 0, p), Rat(8));  // 6 from prefix + 2 at ratio 1
  // Arbitrary extra amounts of the free good stay optimal.
  EXPECT_TRUE(is_optimal_bundle(m, 0, p, {Rat(50), Rat(2)}).ok());
  EXPECT_FALSE(is_optimal_bundle(m, 0, p, {Rat(1), Rat(2)}).ok());
}

TEST(Demand, CanonicalBundleFillsAscendingFiniteFirst) {
  Market m = one_pair_market();
  PriceVector p{Rat(1), Rat(2)};
  Bundle a = canonical_bundle(m, 0, p);
  // Tie edges: good 0 infinite, good 1 finite cap 1 unit. Finite edges fill
  // first (ascending index), then infinite ones absorb the rest.
  EXPECT_EQ(a[1], Rat(1));
  EXPECT_EQ(a[0], Rat(1));
  EXPECT_EQ(bundle_cost(a, p), Rat(3));
  EXPECT_TRUE(is_optimal_bundle(m, 0, p, a).ok());
}

// Property: no sampled budget-feasible bundle beats optimal_utility, and
// the canonical bundle attains it exactly.
TEST(DemandProperty, OracleDominance) {
  fishertest::Rng rng(505);
  fishertest::MarketGenOptions opt;
  opt.dyadic = false;
  opt.max_segments = 3;
  int markets = 150, samples = 400;
  for (int t = 0; t < markets; ++t) {
    Market m = fishertest::random_market(rng, opt);
    PriceVector p = fishertest::random_positive_prices(rng, m.num_goods());
    for (int i = 0; i < m.num_buyers(); ++i) {
      Rat best = optimal_utility(m, i, p);
      Bundle canon = canonical_bundle(m, i, p);
      EXPECT_EQ(utility(m, i, canon), best);
      EXPECT_LE(bundle_cost(canon, p), m.buyers[i].money);
      for (int s = 0; s < samples; ++s) {
        Bundle a = fishertest::random_feasible_bundle(rng, m, i, p);
        EXPECT_LE(utility(m, i, a), best);
      }
    }
  }
}

// Property: every bundle generated from the profile passes is_optimal_bundle
// and (unless satiated) costs exactly the buyer's money.
TEST(DemandProperty, ProfileConsistencyAndBudgetTightness) {
  fishertest::Rng rng(606);
  fishertest::MarketGenOptions opt;
  opt.max_segments = 3;
  for (int t = 0; t < 300; ++t) {
    Market m = fishertest::random_market(rng, opt);
    PriceVector p = fishertest::random_positive_prices(rng, m.num_goods());
    for (int i = 0; i < m.num_buyers(); ++i) {
      DemandProfile d = compute_demand(m, i, p);
      for (int rep = 0; rep < 5; ++rep) {
        Bundle a = bundle_from_profile(rng, d, p);
        EXPECT_TRUE(is_optimal_bundle(m, i, p, a, d).ok());
        if (!d.satiated) {
          EXPECT_EQ(bundle_cost(a, p), m.buyers[i].money);
        }
      }
    }
  }
}

// Property: mandatory segments sit strictly above the tie ratio and unbought
// segments strictly below it.
TEST(DemandProperty, RatioMonotonicity) {
  fishertest::Rng rng(707);
  fishertest::MarketGenOptions opt;
  opt.max_segments = 3;
  for (int t = 0; t < 300; ++t) {
    Market m = fishertest::random_market(rng, opt);
    PriceVector p = fishertest::random_positive_prices(rng, m.num_goods());
    for (int i = 0; i < m.num_buyers(); ++i) {
      DemandProfile d = compute_demand(m, i, p);
      if (!d.tie_ratio) continue;
      for (const auto& [j, curve] : m.buyers[i].valuations) {
        Rat pos(0);
        for (const PlcSegment& s : curve.segments()) {
          if (s.slope.sign() <= 0) break;
          Rat ratio = s.slope / p[j];
          bool is_tie = false;
          for (const TieEdge& e : d.tie_edges) {
            if (e.good == j && ratio == *d.tie_ratio) is_tie = true;
          }
          if (is_tie) {
            EXPECT_EQ(ratio, *d.tie_ratio);
          } else if (d.mandatory[j] > pos) {
            // Segment begins below the mandatory frontier: it was bought.
            EXPECT_GT(ratio, *d.tie_ratio);
          } else {
            EXPECT_LT(ratio, *d.tie_ratio);
          }
          if (!s.length) break;
          pos += *s.length;
        }
      }
    }
  }
}

}  // namespace
}  // namespace fisher
