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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fisher/certify.hpp"
#include "fisher/demand.hpp"
#include "fisher/market.hpp"

namespace fisher {

// Multiplicative tatonnement over canonical demand. No convergence claim is
// made anywhere: the loop is a desk-scale search harness whose only promise
// is that anything it reports as certified re-certifies exactly.
struct SolverConfig {
  Rat step = Rat(1, 4);                  // lambda in (0, 1)
  long max_iterations = 1000;
  Rat target_eps = Rat(1, 100);
  std::optional<PriceVector> initial;    // default: all ones
  enum class Damping { fixed, halve_on_oscillation };
  Damping damping = Damping::halve_on_oscillation;
  Rat min_price = Rat(mpz_class(1), int_pow(2, 40));
  mpz_class den_bound = int_pow(2, 40);  // price denominator cap per round
  long certify_interval = 32;
  std::uint64_t seed = 0;                // perturbation stream for restarts
  ClearingMode mode = ClearingMode::approximate;
  bool keep_trace = true;

  void check() const {
    if (step.sign() <= 0 || step >= Rat(1)) {
      throw std::invalid_argument("step must be in (0, 1)");
    }
    if (max_iterations < 1) {
      throw std::invalid_argument("max_iterations must be >= 1");
    }
    if (target_eps.sign() < 0) {
      throw std::invalid_argument("target eps must be >= 0");
    }
    if (min_price.sign() <= 0) {
      throw std::invalid_argument("min_price must be positive");
    }
    if (certify_interval < 1) {
      throw std::invalid_argument("certify_interval must be >= 1");
    }
  }
};

struct IterationStat {
  long iteration = 0;
  Rat max_rel_excess;
  std::uint64_t price_hash = 0;
};

struct SolverReport {
  enum class Outcome { certified, exhausted };
  Outcome outcome = Outcome::exhausted;
  PriceVector prices;                  // certified prices or best-seen prices
  std::optional<Certificate> certificate;
  Rat best_residual;                   // smallest max relative excess seen
  PriceVector best_prices;
  long iterations_used = 0;
  int restarts = 0;
  std::vector<IterationStat> trace;
};

namespace detail {

inline std::uint64_t hash_prices(const PriceVector& p) {
  std::string s;
  for (const Rat& x : p) {
    s += x.str();
    s += ',';
  }
  return fnv1a64(s);
}

// splitmix64; deterministic perturbation stream for restarts.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

inline SolverReport tatonnement(const Market& m, const SolverConfig& cfg) {
  cfg.check();
  assert_well_formed(m);
  {
    MarketReport r = validate_market(m, Rat(1), m.num_goods(),
                                     1 << 20);  // only maxfield matters here
    if (!r.maxfield) {
      throw std::invalid_argument(
          "market violates the Maxfield condition; no equilibrium is "
          "guaranteed to exist and the solver refuses to run");
    }
  }
  const int ng = m.num_goods();
  const int nb = m.num_buyers();

  PriceVector p;
  if (cfg.initial) {
    if (static_cast<int>(cfg.initial->size()) != ng) {
      throw std::invalid_argument("initial price dimension mismatch");
    }
    p = *cfg.initial;
  } else {
    p.assign(ng, Rat(1));
  }
  auto clamp_round = [&](PriceVector& v) {
    for (Rat& x : v) {
      if (x < cfg.min_price) x = cfg.min_price;
      x = round_to_den_bound(x, cfg.den_bound);
      if (x < cfg.min_price) x = cfg.min_price;
    }
  };
  clamp_round(p);

  SolverReport rep;
  rep.best_prices = p;
  bool have_best = false;
  Rat lambda = cfg.step;
  const Rat lambda_floor = cfg.step / Rat(1024);
  std::vector<int> prev_sign(ng, 0);
  bool have_prev_sign = false;
  std::optional<PriceVector> certified_at;

  long iter = 0;
  while (iter < cfg.max_iterations) {
    ++iter;
    std::vector<Rat> z(ng, Rat(0));
    bool unbounded = false;
    for (int i = 0; i < nb && !unbounded; ++i) {
      try {
        Bundle b = canonical_bundle(m, i, p);
        for (int j = 0; j < ng; ++j) z[j] += b[j];
      } catch (const UnboundedDemandError&) {
        unbounded = true;
      }
    }
    if (unbounded) {
      // Deterministic restart: fresh prices jittered off the seed stream.
      ++rep.restarts;
      for (int j = 0; j < ng; ++j) {
        std::uint64_t r = detail::mix64(cfg.seed * 0x10001ull +
                                        rep.restarts * 8191ull + j);
        p[j] = Rat(1) + Rat(static_cast<long>(r % 4096), 8192);
      }
      clamp_round(p);
      have_prev_sign = false;
      continue;
    }
    Rat mre(0);
    for (int j = 0; j < ng; ++j) {
      z[j] -= m.goods[j].supply;
      Rat rel = z[j].abs() / m.goods[j].supply;
      if (rel > mre) mre = rel;
    }
    if (cfg.keep_trace) {
      rep.trace.push_back({iter, mre, detail::hash_prices(p)});
    }
    if (!have_best || mre < rep.best_residual) {
      have_best = true;
      rep.best_residual = mre;
      rep.best_prices = p;
    }

    const bool near = mre < Rat(2) * cfg.target_eps || mre.is_zero();
    if (near || iter % cfg.certify_interval == 0) {
      CertifyResult cr = certify_equilibrium(m, p, cfg.target_eps, cfg.mode);
      if (certified(cr)) {
        certified_at = p;
        break;
      }
    }

    if (cfg.damping == SolverConfig::Damping::halve_on_oscillation &&
        have_prev_sign) {
      int flips = 0, active = 0;
      for (int j = 0; j < ng; ++j) {
        int s = z[j].sign();
        if (s != 0 && prev_sign[j] != 0) {
          ++active;
          if (s != prev_sign[j]) ++flips;
        }
      }
      if (active > 0 && 2 * flips > active && lambda > lambda_floor) {
        lambda = max(lambda / Rat(2), lambda_floor);
      }
    }
    for (int j = 0; j < ng; ++j) prev_sign[j] = z[j].sign();
    have_prev_sign = true;

    for (int j = 0; j < ng; ++j) {
      p[j] *= Rat(1) + lambda * z[j] / m.goods[j].supply;
    }
    clamp_round(p);
  }
  rep.iterations_used = iter;

  if (certified_at) {
    // The in-loop certificate is discarded; the reported one comes from a
    // fresh, final certification of the candidate prices.
    CertifyResult cr =
        certify_equilibrium(m, *certified_at, cfg.target_eps, cfg.mode);
    if (certified(cr)) {
      rep.outcome = SolverReport::Outcome::certified;
      rep.prices = *certified_at;
      rep.certificate = std::get<Certificate>(cr);
      return rep;
    }
  }
  rep.outcome = SolverReport::Outcome::exhausted;
  rep.prices = rep.best_prices;
  return rep;
}

}  // namespace fisher
