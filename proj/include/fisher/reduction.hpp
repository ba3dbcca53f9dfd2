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
#include <utility>
#include <vector>

#include "fisher/certify.hpp"
#include "fisher/games.hpp"
#include "fisher/market.hpp"
#include "fisher/plc.hpp"

namespace fisher {

// Index conventions. Goods, buyers and strategies are zero-based everywhere
// in code and files; display strings are one-based. All pair arithmetic goes
// through these helpers so the conversion lives in exactly one place:
// pair k (zero-based) owns goods (2k, 2k+1); the y-side pair k of an n-game
// owns goods (2(n+k), 2(n+k)+1); the two sink goods of a reduced market are
// 4n and 4n+1.
namespace idx {
inline int pair_lo(int k) { return 2 * k; }
inline int pair_hi(int k) { return 2 * k + 1; }
inline int ypair_lo(int n, int k) { return 2 * (n + k); }
inline int ypair_hi(int n, int k) { return 2 * (n + k) + 1; }
inline int sink_main(int n) { return 4 * n; }      // priced sink
inline int sink_spare(int n) { return 4 * n + 1; }  // valueless sink
}  // namespace idx

// The price-regulating family: n buyers, 2n unit-supply goods; buyer k holds
// 3 money, values its odd good linearly at 2 and its even good as [4, 1; 1].
inline Market build_price_regulating_market(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  Market m;
  m.goods.assign(2 * n, Good{Rat(1)});
  m.buyers.reserve(n);
  for (int k = 0; k < n; ++k) {
    Buyer b;
    b.money = Rat(3);
    b.label = "T_" + std::to_string(k + 1);
    b.valuations.emplace(idx::pair_lo(k), PlcCurve::linear(Rat(2)));
    b.valuations.emplace(idx::pair_hi(k),
                         PlcCurve::two_segment(Rat(4), Rat(1), Rat(1)));
    m.buyers.push_back(std::move(b));
  }
  assert_well_formed(m);
  return m;
}

// Difference-row gadget data for one T_u / T_v buyer.
struct GadgetInfo {
  int i = -1, j = -1;          // zero-based strategy pair, i != j
  std::vector<Rat> diff;       // C = row/column difference, length n
  std::vector<int> nonzero;    // indices k with C_k != 0
  Rat diff_sum;                // sum of C_k
  Rat money;
  std::vector<Rat> aux;        // s vector, length 4n (good units)
};

struct ReductionMeta {
  int n = 0;                       // game dimension
  std::vector<GadgetInfo> u_gadgets;  // row-difference buyers, |U| = n(n-1)
  std::vector<GadgetInfo> v_gadgets;  // column-difference buyers

  int num_goods() const { return 4 * n + 2; }
  int num_anchor_buyers() const { return 2 * n + 1; }
  int num_buyers() const {
    return num_anchor_buyers() +
           static_cast<int>(u_gadgets.size() + v_gadgets.size());
  }
  // Buyer index layout: anchors first, then u gadgets, then v gadgets.
  int u_buyer(int t) const { return num_anchor_buyers() + t; }
  int v_buyer(int t) const {
    return num_anchor_buyers() + static_cast<int>(u_gadgets.size()) + t;
  }
};

namespace detail {

// Shared shape of the T_u / T_v construction. The two sides differ only in
// which half of the good range carries the difference curves and which
// carries the designated pair: mirrored = false places the difference
// curves on the y-side goods (T_u), mirrored = true places them on the
// x-side goods (T_v).
inline GadgetInfo build_gadget(int n, int i, int j, bool mirrored,
                               const std::vector<Rat>& diff, Buyer* buyer) {
  GadgetInfo g;
  g.i = i;
  g.j = j;
  g.diff = diff;
  g.aux.assign(4 * n, Rat(0));
  g.diff_sum = Rat(0);
  for (int k = 0; k < n; ++k) {
    g.diff_sum += diff[k];
    if (!diff[k].is_zero()) g.nonzero.push_back(k);
  }
  const int m_nonzero = static_cast<int>(g.nonzero.size());
  g.money = Rat(3) * inv_pow(n, 12) +
            (Rat(6 * m_nonzero) + g.diff_sum) * inv_pow(n, 13);

  const Rat knee_small = Rat(2) * inv_pow(n, 13);
  const Rat knee_pair = inv_pow(n, 12);
  for (int k : g.nonzero) {
    int lo = mirrored ? idx::pair_lo(k) : idx::ypair_lo(n, k);
    int hi = mirrored ? idx::pair_hi(k) : idx::ypair_hi(n, k);
    Rat knee_hi = (Rat(2) + diff[k]) * inv_pow(n, 13);
    buyer->valuations.emplace(
        lo, PlcCurve::two_segment(Rat(81), Rat(1), knee_small));
    // A difference of -2 empties the first segment; the curve degenerates
    // to the plain unit-slope line and the aux entry to zero.
    if (!knee_hi.is_zero()) {
      buyer->valuations.emplace(
          hi, PlcCurve::two_segment(Rat(81), Rat(1), knee_hi));
    } else {
      buyer->valuations.emplace(hi, PlcCurve::linear(Rat(1)));
    }
    g.aux[lo] = knee_small;
    g.aux[hi] = knee_hi;
  }
  int des_lo = mirrored ? idx::ypair_lo(n, j) : idx::pair_lo(j);
  int des_hi = mirrored ? idx::ypair_hi(n, j) : idx::pair_hi(j);
  buyer->valuations.emplace(
      des_lo, PlcCurve::two_segment(Rat(27), Rat(1), knee_pair));
  buyer->valuations.emplace(
      des_hi, PlcCurve::two_segment(Rat(9), Rat(1), knee_pair));
  g.aux[des_lo] = knee_pair;
  g.aux[des_hi] = knee_pair;

  buyer->valuations.emplace(idx::sink_main(n), PlcCurve::linear(Rat(3)));
  // The spare sink good is valueless to every gadget buyer (zero function,
  // stored implicitly).
  return g;
}

}  // namespace detail

// Compiles a sparse normalized game into a Fisher market. The anchor buyers
// reproduce the price-regulating family on 4n+2 goods with the shifted knee
// 1 + 1/n^20; each ordered strategy pair (i, j) contributes one
// row-difference buyer and one column-difference buyer; supplies are one
// plus the gadget aux totals, with both sink supplies exactly one.
inline std::pair<Market, ReductionMeta> build_reduction_market(
    const BimatrixGame& game) {
  GameValidation gv = validate_sparse_normalized(game);
  if (!gv.ok) {
    throw std::invalid_argument("game is not sparse normalized: " +
                                gv.violation);
  }
  const int n = game.size();
  if (n < 2) {
    throw std::invalid_argument(
        "reduction requires n >= 2 (ordered pairs must exist)");
  }

  Market m;
  ReductionMeta meta;
  meta.n = n;
  const int num_goods = 4 * n + 2;

  const Rat anchor_knee = Rat(1) + inv_pow(n, 20);
  for (int k = 0; k < 2 * n + 1; ++k) {
    Buyer b;
    b.money = Rat(3);
    b.label = "T_" + std::to_string(k + 1);
    b.valuations.emplace(idx::pair_lo(k), PlcCurve::linear(Rat(2)));
    b.valuations.emplace(idx::pair_hi(k),
                         PlcCurve::two_segment(Rat(4), Rat(1), anchor_knee));
    m.buyers.push_back(std::move(b));
  }

  std::vector<Rat> supply(num_goods, Rat(1));
  auto add_gadget = [&](int i, int j, bool mirrored) {
    Buyer b;
    b.label = std::string(mirrored ? "T_v(" : "T_u(") +
              std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
    std::vector<Rat> diff(n);
    for (int k = 0; k < n; ++k) {
      diff[k] = mirrored ? game.B[k][i] - game.B[k][j]
                         : game.A[i][k] - game.A[j][k];
    }
    GadgetInfo g = detail::build_gadget(n, i, j, mirrored, diff, &b);
    b.money = g.money;
    if (b.money.sign() <= 0) {
      throw std::logic_error("gadget money must be positive");
    }
    for (int k = 0; k < 4 * n; ++k) supply[k] += g.aux[k];
    (mirrored ? meta.v_gadgets : meta.u_gadgets).push_back(std::move(g));
    m.buyers.push_back(std::move(b));
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) add_gadget(i, j, /*mirrored=*/false);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) add_gadget(i, j, /*mirrored=*/true);
    }
  }

  m.goods.reserve(num_goods);
  for (int k = 0; k < num_goods; ++k) m.goods.push_back(Good{supply[k]});
  assert_well_formed(m);
  return {std::move(m), std::move(meta)};
}

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ClampEntry {
  bool x_side;
  int k;        // zero-based strategy index
  Rat magnitude;  // absolute value of the clamped negative entry
};

struct DecodedProfile {
  std::vector<Rat> x_raw, y_raw;  // pre-normalization pair differences
  MixedProfile normalized;
  std::vector<ClampEntry> clamps;
};

// Reads the encoded strategy weights off a price vector of a reduced market:
// raw_k = p_even - (p_odd + p_even) / 3 per pair, then normalization to the
// simplex. Entries within clamp_tol below zero clamp to zero and are
// reported; anything lower is an error, as is a zero normalization sum.
inline DecodedProfile decode_prices(const PriceVector& p, int n,
                                    std::optional<Rat> clamp_tol_opt =
                                        std::nullopt) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (static_cast<int>(p.size()) != 4 * n + 2) {
    throw std::invalid_argument("price vector must have dimension 4n+2");
  }
  const Rat clamp_tol = clamp_tol_opt ? *clamp_tol_opt : inv_pow(n, 9);
  if (clamp_tol.sign() < 0) {
    throw std::invalid_argument("clamp_tol must be >= 0");
  }

  DecodedProfile out;
  auto raw_pair = [&](int lo, int hi) {
    return p[hi] - (p[lo] + p[hi]) / Rat(3);
  };
  for (int k = 0; k < n; ++k) {
    out.x_raw.push_back(raw_pair(idx::pair_lo(k), idx::pair_hi(k)));
    out.y_raw.push_back(raw_pair(idx::ypair_lo(n, k), idx::ypair_hi(n, k)));
  }
  auto clamp_vec = [&](std::vector<Rat> v, bool x_side) {
    for (int k = 0; k < n; ++k) {
      if (v[k].sign() < 0) {
        if (-v[k] > clamp_tol) {
          throw DecodeError(
              std::string(x_side ? "x" : "y") + "[" + std::to_string(k) +
              "] = " + v[k].str() +
              " is below -clamp_tol; prices violate the regulation band");
        }
        out.clamps.push_back({x_side, k, -v[k]});
        v[k] = Rat(0);
      }
    }
    return v;
  };
  std::vector<Rat> xc = clamp_vec(out.x_raw, true);
  std::vector<Rat> yc = clamp_vec(out.y_raw, false);
  auto normalize = [](std::vector<Rat> v, const char* side) {
    Rat sum(0);
    for (const Rat& e : v) sum += e;
    if (sum.is_zero()) {
      throw DecodeError(std::string(side) +
                        " decodes to the zero vector; normalization undefined");
    }
    for (Rat& e : v) e /= sum;
    return v;
  };
  out.normalized.x = normalize(std::move(xc), "x");
  out.normalized.y = normalize(std::move(yc), "y");
  return out;
}

struct PriceRegulationCheck {
  bool ok = true;
  int pair = -1;  // zero-based offending pair
  enum class Bound { none, sum_low, sum_high, ratio_low, ratio_high } bound =
      Bound::none;
  Rat value;  // offending sum or ratio
};

// Exact regulation bounds for the first `pairs` price pairs: the pair sum
// within [3/(1+eps), 3/(1-eps)] and the odd/even ratio within [1/2, 2].
// A zero even price reports as a ratio violation rather than dividing.
inline PriceRegulationCheck check_price_regulation(const PriceVector& p,
                                                   int pairs, const Rat& eps) {
  if (eps.sign() < 0 || eps >= Rat(1)) {
    throw std::invalid_argument("eps must be in [0, 1)");
  }
  if (static_cast<int>(p.size()) < 2 * pairs) {
    throw std::invalid_argument("price vector shorter than 2*pairs");
  }
  const Rat lo = Rat(3) / (Rat(1) + eps);
  const Rat hi = Rat(3) / (Rat(1) - eps);
  for (int k = 0; k < pairs; ++k) {
    const Rat& a = p[idx::pair_lo(k)];
    const Rat& b = p[idx::pair_hi(k)];
    Rat sum = a + b;
    if (sum < lo) return {false, k, PriceRegulationCheck::Bound::sum_low, sum};
    if (sum > hi) return {false, k, PriceRegulationCheck::Bound::sum_high, sum};
    if (b.is_zero()) {
      return {false, k, PriceRegulationCheck::Bound::ratio_high, Rat(0)};
    }
    Rat ratio = a / b;
    if (ratio < Rat(1, 2)) {
      return {false, k, PriceRegulationCheck::Bound::ratio_low, ratio};
    }
    if (ratio > Rat(2)) {
      return {false, k, PriceRegulationCheck::Bound::ratio_high, ratio};
    }
  }
  return {};
}

// Asymptotic band diagnostic with caller-supplied hidden constants: checks
// 3 - c_low/n^11 <= sum <= 3 + c_high/n^10 per pair. Heuristic only; the
// constants default to 1.
struct BandDiagnostic {
  bool within = true;
  int pair = -1;
  Rat sum;
};

inline BandDiagnostic price_band_diagnostic(const PriceVector& p, int pairs,
                                            int n, const Rat& c_low = Rat(1),
                                            const Rat& c_high = Rat(1)) {
  if (static_cast<int>(p.size()) < 2 * pairs) {
    throw std::invalid_argument("price vector shorter than 2*pairs");
  }
  const Rat lo = Rat(3) - c_low * inv_pow(n, 11);
  const Rat hi = Rat(3) + c_high * inv_pow(n, 10);
  for (int k = 0; k < pairs; ++k) {
    Rat sum = p[idx::pair_lo(k)] + p[idx::pair_hi(k)];
    if (sum < lo || sum > hi) return {false, k, sum};
  }
  return {};
}

// Largest pairwise price ratio; the construction keeps it below 3 at any
// certified equilibrium. Zero prices report as not-below.
struct MaxRatioDiagnostic {
  bool below_three = true;
  int num = -1, den = -1;  // p[num]/p[den] is the extreme ratio
  Rat ratio;
};

inline MaxRatioDiagnostic max_price_ratio_diagnostic(const PriceVector& p) {
  MaxRatioDiagnostic d;
  int lo = -1, hi = -1;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (p[i].is_zero()) {
      return {false, -1, i, Rat(0)};
    }
    if (lo < 0 || p[i] < p[lo]) lo = i;
    if (hi < 0 || p[i] > p[hi]) hi = i;
  }
  d.num = hi;
  d.den = lo;
  d.ratio = p[hi] / p[lo];
  d.below_three = d.ratio < Rat(3);
  return d;
}

struct RoundtripReport {
  bool certified = false;
  std::optional<Refutation> refutation;   // when not certified
  std::optional<DecodedProfile> decoded;  // absent when decode failed
  std::string decode_error;
  bool well_supported = false;
  std::optional<WellSupportedCheck> nash_check;  // absent when decode failed
  BandDiagnostic band;
  MaxRatioDiagnostic ratio;
  // The tested implication: certified prices must decode to a well-supported
  // profile.
  bool implication_holds() const { return !certified || well_supported; }
};

// Chains certification of the reduced market, price decoding, and the
// well-supported check. Market-side eps defaults to n^-21 and game-side eps
// to n^-6, where n is the game dimension. Decode diagnostics are emitted
// even when certification fails.
inline RoundtripReport roundtrip_check(
    const BimatrixGame& game, const PriceVector& p,
    std::optional<Rat> eps_market_opt = std::nullopt,
    std::optional<Rat> eps_nash_opt = std::nullopt) {
  auto [market, meta] = build_reduction_market(game);
  const int n = meta.n;
  if (static_cast<int>(p.size()) != meta.num_goods()) {
    throw std::invalid_argument("price vector dimension mismatch for game");
  }
  const Rat eps_market = eps_market_opt ? *eps_market_opt : inv_pow(n, 21);
  const Rat eps_nash = eps_nash_opt ? *eps_nash_opt : inv_pow(n, 6);

  RoundtripReport rep;
  CertifyResult cr = certify_equilibrium(market, p, eps_market);
  rep.certified = certified(cr);
  if (!rep.certified) rep.refutation = std::get<Refutation>(cr);
  try {
    rep.decoded = decode_prices(p, n);
  } catch (const DecodeError& e) {
    rep.decode_error = e.what();
  }
  if (rep.decoded) {
    rep.nash_check =
        check_well_supported(game, rep.decoded->normalized, eps_nash);
    rep.well_supported = rep.nash_check->ok;
  }
  rep.band = price_band_diagnostic(p, 2 * n + 1, n);
  rep.ratio = max_price_ratio_diagnostic(p);
  return rep;
}

}  // namespace fisher
