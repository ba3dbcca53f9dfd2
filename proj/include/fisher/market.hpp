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

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fisher/plc.hpp"
#include "fisher/rational.hpp"

namespace fisher {

struct Good {
  Rat supply;  // units; must be positive
};

// A buyer holds money and a sparse valuation map; goods absent from the map
// carry the zero valuation. The label is opaque metadata (the reduction uses
// it to mark gadget buyers) and never influences any computation.
struct Buyer {
  Rat money;
  std::string label;
  std::map<int, PlcCurve> valuations;
};

struct Market {
  std::vector<Good> goods;
  std::vector<Buyer> buyers;

  int num_goods() const { return static_cast<int>(goods.size()); }
  int num_buyers() const { return static_cast<int>(buyers.size()); }

  // Valuation of buyer i for good j; the zero function when absent.
  const PlcCurve& valuation(int i, int j) const {
    auto it = buyers[i].valuations.find(j);
    return it == buyers[i].valuations.end() ? PlcCurve::zero() : it->second;
  }
};

using Bundle = std::vector<Rat>;       // units of each good, one buyer
using Allocation = std::vector<Bundle>;  // one bundle per buyer
using PriceVector = std::vector<Rat>;  // money per unit good

// Structural well-formedness: positive supplies and money, in-range
// valuation indices, at least one good and one buyer. Throws on violation;
// every loader and builder funnels through here.
inline void assert_well_formed(const Market& m) {
  if (m.goods.empty()) throw std::invalid_argument("market has no goods");
  if (m.buyers.empty()) throw std::invalid_argument("market has no buyers");
  for (const Good& g : m.goods) {
    if (g.supply.sign() <= 0) {
      throw std::invalid_argument("good supply must be positive");
    }
  }
  for (const Buyer& b : m.buyers) {
    if (b.money.sign() <= 0) {
      throw std::invalid_argument("buyer money must be positive");
    }
    for (const auto& [j, curve] : b.valuations) {
      if (j < 0 || j >= m.num_goods()) {
        throw std::invalid_argument("valuation index out of range");
      }
      (void)curve;  // curves are validated at construction
    }
  }
}

// Prices must be nonnegative, nonzero as a vector, and dimensioned to the
// market.
inline void assert_valid_prices(const Market& m, const PriceVector& p) {
  if (static_cast<int>(p.size()) != m.num_goods()) {
    throw std::invalid_argument("price vector dimension mismatch");
  }
  bool any_positive = false;
  for (const Rat& x : p) {
    if (x.sign() < 0) throw std::invalid_argument("negative price");
    if (x.sign() > 0) any_positive = true;
  }
  if (!any_positive) throw std::invalid_argument("price vector is all zero");
}

struct MarketReport {
  bool maxfield = false;        // every buyer has a strictly monotone curve
  bool alpha_bounded = false;   // every non-zero curve is alpha-bounded
  bool sparsity_ok = false;     // every buyer values <= t goods
  bool segment_bound_ok = false;  // every curve has <= max_segments segments
  bool all() const {
    return maxfield && alpha_bounded && sparsity_ok && segment_bound_ok;
  }
};

inline MarketReport validate_market(const Market& m, const Rat& alpha, int t,
                                    int max_segments) {
  MarketReport r{true, true, true, true};
  for (const Buyer& b : m.buyers) {
    int nonzero = 0;
    bool monotone = false;
    for (const auto& [j, curve] : b.valuations) {
      (void)j;
      if (curve.is_zero()) continue;
      ++nonzero;
      if (curve.strictly_monotone()) monotone = true;
      PlcFlags f = curve.classify(alpha);
      if (!f.alpha_bounded) r.alpha_bounded = false;
      if (f.segment_count > max_segments) r.segment_bound_ok = false;
    }
    if (!monotone) r.maxfield = false;
    if (nonzero > t) r.sparsity_ok = false;
  }
  return r;
}

// u_i(a) = sum of per-good PLC values.
inline Rat utility(const Market& m, int i, const Bundle& a) {
  if (static_cast<int>(a.size()) != m.num_goods()) {
    throw std::invalid_argument("bundle dimension mismatch");
  }
  Rat total(0);
  for (const auto& [j, curve] : m.buyers[i].valuations) {
    if (a[j].sign() < 0) throw std::domain_error("negative bundle entry");
    total += curve.evaluate(a[j]);
  }
  // Entries without a valuation contribute nothing but must still be valid.
  for (const Rat& x : a) {
    if (x.sign() < 0) throw std::domain_error("negative bundle entry");
  }
  return total;
}

inline Rat bundle_cost(const Bundle& a, const PriceVector& p) {
  Rat c(0);
  for (std::size_t j = 0; j < a.size(); ++j) c += a[j] * p[j];
  return c;
}

}  // namespace fisher
