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

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fisher/demand.hpp"
#include "fisher/flow.hpp"
#include "fisher/market.hpp"

namespace fisher {

// Exact mode: positively-priced goods must clear with equality and
// zero-priced goods must not be over-allocated. Approximate mode: every
// good's absolute clearing residual is bounded by eps times its supply.
enum class ClearingMode { exact, approximate };

struct Certificate {
  Allocation witness;
  std::vector<Rat> residuals;  // |sum_i a_ij - c_j| per good
  ClearingMode mode = ClearingMode::approximate;
  Rat epsilon;
};

struct Refutation {
  enum class Kind {
    unbounded_demand,
    over_demanded,
    under_demanded,
    infeasible_flow,
  };
  Kind kind = Kind::infeasible_flow;
  int buyer = -1;
  int good = -1;
  Rat gap;  // exact violation magnitude where one is well defined
  std::string detail;
};

using CertifyResult = std::variant<Certificate, Refutation>;

inline bool certified(const CertifyResult& r) {
  return std::holds_alternative<Certificate>(r);
}

struct AllocationCheck {
  bool ok = true;
  std::vector<std::string> violations;
};

// Definition-level recheck of a concrete allocation: every bundle optimal,
// every good cleared under the chosen mode.
inline AllocationCheck check_allocation(const Market& m, const PriceVector& p,
                                        const Allocation& X, const Rat& eps,
                                        ClearingMode mode) {
  AllocationCheck r;
  assert_valid_prices(m, p);
  if (static_cast<int>(X.size()) != m.num_buyers()) {
    throw std::invalid_argument("allocation has wrong buyer count");
  }
  for (int i = 0; i < m.num_buyers(); ++i) {
    BundleCheck c;
    try {
      c = is_optimal_bundle(m, i, p, X[i]);
    } catch (const UnboundedDemandError& e) {
      r.ok = false;
      r.violations.push_back(e.what());
      continue;
    }
    if (!c.ok()) {
      r.ok = false;
      r.violations.push_back(
          "buyer " + std::to_string(i) +
          (c.verdict == BundleVerdict::budget_violation
               ? " exceeds budget by " + c.gap.str()
               : " is suboptimal by " + c.gap.str()));
    }
  }
  for (int j = 0; j < m.num_goods(); ++j) {
    Rat total(0);
    for (int i = 0; i < m.num_buyers(); ++i) total += X[i][j];
    const Rat& c = m.goods[j].supply;
    if (mode == ClearingMode::exact) {
      bool bad = p[j].sign() > 0 ? total != c : total > c;
      if (bad) {
        r.ok = false;
        r.violations.push_back("good " + std::to_string(j) +
                               " does not clear exactly: demand " +
                               total.str() + " vs supply " + c.str());
      }
    } else {
      Rat resid = (total - c).abs();
      if (resid > eps * c) {
        r.ok = false;
        r.violations.push_back("good " + std::to_string(j) + " residual " +
                               resid.str() + " exceeds eps*supply");
      }
    }
  }
  return r;
}

namespace detail {

// Assembles the money-unit clearing instance from per-buyer demand profiles.
// Zero-priced goods never enter the flow; their feasibility reduces to
// "mandatory prefix within the upper bound" plus free disposal.
struct ClearingSetup {
  ClearingInstance inst;
  std::vector<int> flow_goods;           // instance good -> market good
  std::vector<int> good_to_flow;         // market good -> instance good or -1
  std::vector<Rat> mandatory_total;      // per market good
  std::vector<Rat> unit_lo, unit_hi;     // clearing interval in good units
};

inline ClearingSetup build_clearing(const Market& m, const PriceVector& p,
                                    const std::vector<DemandProfile>& profiles,
                                    const Rat& eps, ClearingMode mode) {
  const int nb = m.num_buyers();
  const int ng = m.num_goods();
  ClearingSetup s;
  s.mandatory_total.assign(ng, Rat(0));
  for (int j = 0; j < ng; ++j) {
    for (int i = 0; i < nb; ++i) s.mandatory_total[j] += profiles[i].mandatory[j];
  }
  s.unit_lo.reserve(ng);
  s.unit_hi.reserve(ng);
  for (int j = 0; j < ng; ++j) {
    const Rat& c = m.goods[j].supply;
    if (mode == ClearingMode::exact) {
      s.unit_lo.push_back(p[j].sign() > 0 ? c : Rat(0));
      s.unit_hi.push_back(c);
    } else {
      s.unit_lo.push_back(c * (Rat(1) - eps));
      s.unit_hi.push_back(c * (Rat(1) + eps));
    }
  }
  s.good_to_flow.assign(ng, -1);
  for (int j = 0; j < ng; ++j) {
    if (p[j].sign() > 0) {
      s.good_to_flow[j] = static_cast<int>(s.flow_goods.size());
      s.flow_goods.push_back(j);
    }
  }
  ClearingInstance& inst = s.inst;
  for (int i = 0; i < nb; ++i) {
    if (profiles[i].satiated) {
      inst.supply_lo.push_back(Rat(0));
      inst.supply_hi.push_back(profiles[i].surplus);
    } else {
      inst.supply_lo.push_back(profiles[i].leftover_money);
      inst.supply_hi.push_back(profiles[i].leftover_money);
    }
  }
  for (int jf = 0; jf < static_cast<int>(s.flow_goods.size()); ++jf) {
    int j = s.flow_goods[jf];
    // Clamped so the instance stays well formed even when mandatory
    // purchases already overshoot; the caller refutes that case before
    // running the flow.
    Rat hi_units = max(Rat(0), s.unit_hi[j] - s.mandatory_total[j]);
    Rat lo_units =
        min(hi_units, max(Rat(0), s.unit_lo[j] - s.mandatory_total[j]));
    inst.good_lo.push_back(lo_units * p[j]);
    inst.good_hi.push_back(hi_units * p[j]);
  }
  for (int i = 0; i < nb; ++i) {
    if (profiles[i].satiated) {
      // Past satiation every marginal value is zero, so surplus money may
      // sink into any positively-priced good without hurting optimality.
      for (int jf = 0; jf < static_cast<int>(s.flow_goods.size()); ++jf) {
        inst.edges.push_back({i, jf, Cap::inf()});
      }
    } else {
      for (const TieEdge& e : profiles[i].tie_edges) {
        int jf = s.good_to_flow[e.good];
        if (jf < 0) continue;  // zero-priced tie edges carry no money
        inst.edges.push_back(
            {i, jf,
             e.capacity_units ? Cap::of(*e.capacity_units * p[e.good])
                              : Cap::inf()});
      }
    }
  }
  return s;
}

}  // namespace detail

// Decides whether p admits an allocation of optimal bundles that clears the
// market, and produces either a witness allocation or a refutation with an
// exact violation. The witness is always recheck()d before being returned.
inline CertifyResult certify_equilibrium(const Market& m, const PriceVector& p,
                                         const Rat& eps,
                                         ClearingMode mode =
                                             ClearingMode::approximate) {
  assert_valid_prices(m, p);
  if (eps.sign() < 0) throw std::invalid_argument("eps must be >= 0");
  if (mode == ClearingMode::exact && !eps.is_zero()) {
    throw std::invalid_argument("exact mode requires eps = 0");
  }

  const int nb = m.num_buyers();
  const int ng = m.num_goods();
  std::vector<DemandProfile> profiles;
  profiles.reserve(nb);
  for (int i = 0; i < nb; ++i) {
    try {
      profiles.push_back(compute_demand(m, i, p));
    } catch (const UnboundedDemandError& e) {
      Refutation r;
      r.kind = Refutation::Kind::unbounded_demand;
      r.buyer = e.buyer();
      r.good = e.good();
      r.detail = e.what();
      return r;
    }
  }

  detail::ClearingSetup s = detail::build_clearing(m, p, profiles, eps, mode);

  // Mandatory purchases alone must not overshoot any good.
  for (int j = 0; j < ng; ++j) {
    if (s.mandatory_total[j] > s.unit_hi[j]) {
      Refutation r;
      r.kind = Refutation::Kind::over_demanded;
      r.good = j;
      r.gap = s.mandatory_total[j] - s.unit_hi[j];
      r.detail = "good " + std::to_string(j) + " over-demanded: mandatory " +
                 s.mandatory_total[j].str() + " exceeds bound " +
                 s.unit_hi[j].str();
      return r;
    }
  }

  TransportResult t = feasible_transport(s.inst);
  if (std::holds_alternative<FlowInfeasible>(t)) {
    const FlowInfeasible& inf = std::get<FlowInfeasible>(t);
    // Name the most telling good via the canonical demand selection.
    Refutation r;
    r.kind = Refutation::Kind::infeasible_flow;
    r.gap = inf.deficit;
    std::vector<Rat> canon_total(ng, Rat(0));
    for (int i = 0; i < nb; ++i) {
      Bundle b = canonical_bundle(m, i, profiles[i], p);
      for (int j = 0; j < ng; ++j) canon_total[j] += b[j];
    }
    // Only positively-priced goods participate in the flow, so only they
    // can be the cause; zero-priced overshoot was refuted above.
    for (int j : s.flow_goods) {
      if (canon_total[j] > s.unit_hi[j]) {
        r.kind = Refutation::Kind::over_demanded;
        r.good = j;
        r.gap = canon_total[j] - s.unit_hi[j];
        r.detail = "good " + std::to_string(j) + " over-demanded: demand " +
                   canon_total[j].str() + " vs bound " + s.unit_hi[j].str();
        return r;
      }
    }
    for (int j : s.flow_goods) {
      if (canon_total[j] < s.unit_lo[j]) {
        r.kind = Refutation::Kind::under_demanded;
        r.good = j;
        r.gap = s.unit_lo[j] - canon_total[j];
        r.detail = "good " + std::to_string(j) + " under-demanded: demand " +
                   canon_total[j].str() + " vs bound " + s.unit_lo[j].str();
        return r;
      }
    }
    r.detail = "tie-money transport infeasible; unroutable lower-bound mass " +
               inf.deficit.str();
    return r;
  }

  const FlowAssignment& fa = std::get<FlowAssignment>(t);
  Allocation X(nb, Bundle(ng, Rat(0)));
  for (int i = 0; i < nb; ++i) X[i] = profiles[i].mandatory;
  for (std::size_t e = 0; e < s.inst.edges.size(); ++e) {
    const auto& edge = s.inst.edges[e];
    int j = s.flow_goods[edge.good];
    if (fa.edge_flow[e].is_zero()) continue;
    X[edge.buyer][j] += fa.edge_flow[e] / p[j];
  }
  // Free disposal tops zero-priced goods up to supply in approximate mode.
  if (mode == ClearingMode::approximate) {
    for (int j = 0; j < ng; ++j) {
      if (!p[j].is_zero()) continue;
      Rat total = s.mandatory_total[j];
      if (total < m.goods[j].supply) {
        X[0][j] += m.goods[j].supply - total;
      }
    }
  }

  Certificate cert;
  cert.witness = std::move(X);
  cert.mode = mode;
  cert.epsilon = eps;
  for (int j = 0; j < ng; ++j) {
    Rat total(0);
    for (int i = 0; i < nb; ++i) total += cert.witness[i][j];
    cert.residuals.push_back((total - m.goods[j].supply).abs());
  }
  AllocationCheck recheck = check_allocation(m, p, cert.witness, eps, mode);
  if (!recheck.ok) {
    std::string msg = "internal error: certificate failed its own recheck:";
    for (const std::string& v : recheck.violations) msg += " " + v;
    throw std::logic_error(msg);
  }
  return cert;
}

}  // namespace fisher
