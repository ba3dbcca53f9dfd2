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

#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fisher/market.hpp"

namespace fisher {

// Raised when a buyer's optimal utility is unbounded: some good has price
// zero and positive marginal value at every quantity.
class UnboundedDemandError : public std::runtime_error {
 public:
  UnboundedDemandError(int buyer, int good)
      : std::runtime_error("unbounded demand: buyer " +
                           std::to_string(buyer) + " on zero-priced good " +
                           std::to_string(good)),
        buyer_(buyer),
        good_(good) {}
  int buyer() const { return buyer_; }
  int good() const { return good_; }

 private:
  int buyer_, good_;
};

struct TieEdge {
  int good = -1;
  std::optional<Rat> capacity_units;  // nullopt = infinite
};

// Structure of the optimal-bundle set OPT(i, p) for one buyer. A bundle is
// optimal exactly when it is `mandatory`, plus any spread of leftover_money
// over the tie edges within their capacities, plus arbitrary amounts of the
// free goods; a satiated buyer may additionally sink up to `surplus` money
// into goods past their satiation points at zero marginal value.
struct DemandProfile {
  Bundle mandatory;                 // per-good amounts in every optimal bundle
  std::optional<Rat> tie_ratio;     // slope/price at the budget boundary
  std::vector<TieEdge> tie_edges;   // edges whose ratio equals tie_ratio
  Rat leftover_money;               // spent across tie edges; 0 if satiated
  bool satiated = false;            // optimal bundles may leave money unspent
  Rat surplus;                      // unspent budget when satiated, else 0
  std::vector<int> free_goods;      // zero-priced, zero marginal value beyond
                                    // any mandatory prefix
  Rat mandatory_cost;               // cached cost of `mandatory` at p
};

namespace detail {

struct SegmentCandidate {
  Rat ratio;                      // slope / price
  int good;
  std::optional<Rat> units;       // segment capacity; nullopt = infinite
  Rat slope;
};

}  // namespace detail

// Bang-per-buck greedy over all positively-sloped segments of all valued
// goods, with exact-rational ratio comparisons. Segments of one good always
// appear in strictly decreasing ratio order at a fixed positive price, so
// segment precedence within a good is automatic. Throws UnboundedDemandError
// when optimal utility is infinite.
inline DemandProfile compute_demand(const Market& m, int i,
                                    const PriceVector& p) {
  assert_valid_prices(m, p);
  if (i < 0 || i >= m.num_buyers()) {
    throw std::invalid_argument("buyer index out of range");
  }
  const Buyer& buyer = m.buyers[i];
  const int n = m.num_goods();

  DemandProfile out;
  out.mandatory.assign(n, Rat(0));

  std::vector<detail::SegmentCandidate> cands;
  for (const auto& [j, curve] : buyer.valuations) {
    if (curve.is_zero()) continue;
    if (p[j].is_zero()) {
      // Positive slopes at zero price: infinite segments blow up the
      // optimum; finite ones are a free prefix every optimal bundle holds.
      for (const PlcSegment& s : curve.segments()) {
        if (s.slope.sign() <= 0) continue;
        if (!s.length) throw UnboundedDemandError(i, j);
        out.mandatory[j] += *s.length;
      }
      continue;
    }
    for (const PlcSegment& s : curve.segments()) {
      if (s.slope.sign() <= 0) continue;
      cands.push_back({s.slope / p[j], j, s.length, s.slope});
    }
  }
  // Every zero-priced good ends up free beyond its (possibly empty)
  // mandatory prefix, for every buyer.
  for (int j = 0; j < n; ++j) {
    if (p[j].is_zero()) out.free_goods.push_back(j);
  }

  std::sort(cands.begin(), cands.end(),
            [](const detail::SegmentCandidate& a,
               const detail::SegmentCandidate& b) {
              if (a.ratio != b.ratio) return a.ratio > b.ratio;
              return a.good < b.good;
            });

  Rat remaining = buyer.money;
  std::size_t k = 0;
  while (k < cands.size()) {
    // One ratio class at a time.
    std::size_t end = k;
    Rat class_cost(0);
    bool infinite = false;
    while (end < cands.size() && cands[end].ratio == cands[k].ratio) {
      if (cands[end].units) {
        class_cost += *cands[end].units * p[cands[end].good];
      } else {
        infinite = true;
      }
      ++end;
    }
    if (!infinite && class_cost < remaining) {
      for (std::size_t t = k; t < end; ++t) {
        out.mandatory[cands[t].good] += *cands[t].units;
      }
      remaining -= class_cost;
      k = end;
      continue;
    }
    // Budget boundary falls inside (or exactly at the end of) this class.
    out.tie_ratio = cands[k].ratio;
    for (std::size_t t = k; t < end; ++t) {
      out.tie_edges.push_back({cands[t].good, cands[t].units});
    }
    out.leftover_money = remaining;
    remaining = Rat(0);
    break;
  }
  if (remaining.sign() > 0) {
    out.satiated = true;
    out.surplus = remaining;
  }
  out.mandatory_cost = bundle_cost(out.mandatory, p);
  return out;
}

// Value shared by every bundle in OPT(i, p).
inline Rat optimal_utility(const Market& m, int i, const DemandProfile& d) {
  Rat u = utility(m, i, d.mandatory);
  if (d.tie_ratio) u += *d.tie_ratio * d.leftover_money;
  return u;
}

inline Rat optimal_utility(const Market& m, int i, const PriceVector& p) {
  return optimal_utility(m, i, compute_demand(m, i, p));
}

enum class BundleVerdict { optimal, budget_violation, suboptimal };

struct BundleCheck {
  BundleVerdict verdict = BundleVerdict::optimal;
  Rat gap;  // budget excess or utility shortfall, depending on verdict
  bool ok() const { return verdict == BundleVerdict::optimal; }
};

// a is optimal iff it is affordable and reaches the optimal utility; this is
// the ground-truth membership test for OPT(i, p).
inline BundleCheck is_optimal_bundle(const Market& m, int i,
                                     const PriceVector& p, const Bundle& a,
                                     const DemandProfile& d) {
  BundleCheck r;
  Rat cost = bundle_cost(a, p);
  if (cost > m.buyers[i].money) {
    r.verdict = BundleVerdict::budget_violation;
    r.gap = cost - m.buyers[i].money;
    return r;
  }
  Rat u = utility(m, i, a);
  Rat best = optimal_utility(m, i, d);
  if (u < best) {
    r.verdict = BundleVerdict::suboptimal;
    r.gap = best - u;
  }
  return r;
}

inline BundleCheck is_optimal_bundle(const Market& m, int i,
                                     const PriceVector& p, const Bundle& a) {
  return is_optimal_bundle(m, i, p, a, compute_demand(m, i, p));
}

// Deterministic representative of OPT(i, p): tie edges are filled in
// ascending good index, infinite-capacity edges last. Drives the solver's
// excess-demand signal.
inline Bundle canonical_bundle(const Market& m, int i,
                               const DemandProfile& d,
                               const PriceVector& p) {
  (void)m;
  (void)i;
  Bundle a = d.mandatory;
  Rat money = d.leftover_money;
  std::vector<const TieEdge*> finite, infinite;
  for (const TieEdge& e : d.tie_edges) {
    (e.capacity_units ? finite : infinite).push_back(&e);
  }
  auto by_good = [](const TieEdge* x, const TieEdge* y) {
    return x->good < y->good;
  };
  std::sort(finite.begin(), finite.end(), by_good);
  std::sort(infinite.begin(), infinite.end(), by_good);
  for (const TieEdge* e : finite) {
    if (money.is_zero()) break;
    Rat cap_money = *e->capacity_units * p[e->good];
    Rat spend = min(money, cap_money);
    a[e->good] += spend / p[e->good];
    money -= spend;
  }
  for (const TieEdge* e : infinite) {
    if (money.is_zero()) break;
    a[e->good] += money / p[e->good];
    money = Rat(0);
  }
  return a;
}

inline Bundle canonical_bundle(const Market& m, int i, const PriceVector& p) {
  return canonical_bundle(m, i, compute_demand(m, i, p), p);
}

}  // namespace fisher
