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

// Command-line front end. Every subcommand is a thin adapter: parse files,
// call one library operation, serialize the report. Exit codes: 0 =
// certified/verified/success, 1 = refuted or violation found, 2 = invalid
// input or precondition failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fisher/certify.hpp"
#include "fisher/demand.hpp"
#include "fisher/games.hpp"
#include "fisher/io.hpp"
#include "fisher/market.hpp"
#include "fisher/reduction.hpp"
#include "fisher/solver.hpp"
#include "fisher/version.hpp"

namespace {

using fisher::Rat;
using json = nlohmann::json;

constexpr int kOk = 0;
constexpr int kRefuted = 1;
constexpr int kInvalid = 2;

struct Report {
  json inputs = json::object();
  json result = json::object();

  void record_input(const std::string& role, const std::string& path,
                    const std::string& bytes) {
    inputs[role] = {{"path", path}, {"digest", fisher::io::digest_hex(bytes)}};
  }
  void emit(const std::string& command) const {
    json out{{"version", fisher::kVersion},
             {"command", command},
             {"inputs", inputs},
             {"result", result}};
    std::cout << out.dump(2) << std::endl;
  }
};

json load_json_file(const std::string& path, const std::string& role,
                    Report* rep) {
  std::string bytes = fisher::io::read_file(path);
  rep->record_input(role, path, bytes);
  return fisher::io::parse_json(bytes, path);
}

// --prices accepts either a filename or an inline "[1/1,2/1]" list.
fisher::PriceVector load_prices(const std::string& arg, Report* rep) {
  if (!arg.empty() && arg.front() == '[') {
    if (arg.back() != ']') throw fisher::IoError("unterminated price list");
    fisher::PriceVector p;
    std::string body = arg.substr(1, arg.size() - 2);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t comma = body.find(',', pos);
      if (comma == std::string::npos) comma = body.size();
      p.push_back(Rat::parse(body.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    if (p.empty()) throw fisher::IoError("empty price list");
    rep->record_input("prices", "<inline>", arg);
    return p;
  }
  return fisher::io::prices_from_json(load_json_file(arg, "prices", rep));
}

json rats_json(const std::vector<Rat>& v) {
  return fisher::io::rat_vec_to_json(v);
}

json allocation_json(const fisher::Allocation& X) {
  json a = json::array();
  for (const auto& bundle : X) a.push_back(rats_json(bundle));
  return a;
}

json certificate_json(const fisher::Certificate& c) {
  return json{{"verdict", "certified"},
              {"mode", c.mode == fisher::ClearingMode::exact ? "exact"
                                                             : "approximate"},
              {"epsilon", c.epsilon.str()},
              {"witness", allocation_json(c.witness)},
              {"residuals", rats_json(c.residuals)}};
}

json refutation_json(const fisher::Refutation& r) {
  static const char* kKind[] = {"unbounded_demand", "over_demanded",
                                "under_demanded", "infeasible_flow"};
  json j{{"verdict", "refuted"},
         {"kind", kKind[static_cast<int>(r.kind)]},
         {"gap", r.gap.str()},
         {"detail", r.detail}};
  if (r.buyer >= 0) j["buyer"] = r.buyer;
  if (r.good >= 0) {
    j["good"] = r.good;
    j["good_display"] = "G_" + std::to_string(r.good + 1);
  }
  return j;
}

json decoded_json(const fisher::DecodedProfile& d) {
  json clamps = json::array();
  for (const auto& c : d.clamps) {
    clamps.push_back(json{{"side", c.x_side ? "x" : "y"},
                          {"k", c.k},
                          {"magnitude", c.magnitude.str()}});
  }
  return json{{"x_raw", rats_json(d.x_raw)},
              {"y_raw", rats_json(d.y_raw)},
              {"x", rats_json(d.normalized.x)},
              {"y", rats_json(d.normalized.y)},
              {"clamps", clamps}};
}

json nash_check_json(const fisher::WellSupportedCheck& ws) {
  json j{{"well_supported", ws.ok}};
  if (!ws.ok) {
    j["violation"] = json{{"side", ws.row_side ? "row" : "column"},
                          {"better", ws.better},
                          {"placed", ws.placed},
                          {"gap", ws.gap.str()}};
  }
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"exact-arithmetic toolkit for Fisher markets with "
               "piecewise-linear concave utilities"};
  app.require_subcommand(1);

  // build-mn
  auto* build_mn = app.add_subcommand(
      "build-mn", "build the n-pair price-regulating market");
  int mn_n = 1;
  std::string mn_out;
  build_mn->add_option("--n", mn_n, "number of buyer/good pairs")->required();
  build_mn->add_option("--out", mn_out, "output market file");

  // reduce
  auto* reduce = app.add_subcommand(
      "reduce", "compile a sparse normalized game into a market");
  std::string red_game, red_out;
  reduce->add_option("--game", red_game, "game file")->required();
  reduce->add_option("--out", red_out, "output market file (with meta)");

  // certify
  auto* certify = app.add_subcommand(
      "certify", "certify or refute a price vector as an equilibrium");
  std::string cert_market, cert_prices, cert_eps = "0/1";
  bool cert_exact = false;
  certify->add_option("--market", cert_market, "market file")->required();
  certify->add_option("--prices", cert_prices, "prices file or inline [..]")
      ->required();
  certify->add_option("--eps", cert_eps, "clearing tolerance, rational");
  certify->add_flag("--exact", cert_exact,
                    "exact clearing (requires --eps 0/1)");

  // decode
  auto* decode = app.add_subcommand(
      "decode", "decode strategy weights from reduced-market prices");
  std::string dec_market, dec_prices, dec_tol;
  decode->add_option("--market", dec_market, "market file with meta")
      ->required();
  decode->add_option("--prices", dec_prices, "prices file or inline [..]")
      ->required();
  decode->add_option("--clamp-tol", dec_tol,
                     "negative-entry clamp tolerance (default 1/n^9)");

  // nash-check
  auto* nash = app.add_subcommand(
      "nash-check", "check a profile for eps-well-supported equilibrium");
  std::string nash_game, nash_profile, nash_eps = "0/1";
  nash->add_option("--game", nash_game, "game file")->required();
  nash->add_option("--profile", nash_profile, "profile file")->required();
  nash->add_option("--eps", nash_eps, "tolerance, rational");

  // oracle-nash
  auto* oracle = app.add_subcommand(
      "oracle-nash", "enumerate exact equilibria of a small game");
  std::string or_game;
  int or_max_n = 4;
  oracle->add_option("--game", or_game, "game file")->required();
  oracle->add_option("--max-n", or_max_n, "size refusal threshold");

  // solve
  auto* solve = app.add_subcommand(
      "solve", "search for approximate equilibrium prices by tatonnement");
  std::string so_market, so_step = "1/4", so_eps = "1/100", so_trace;
  std::string so_min_price, so_initial;
  long so_iters = 1000, so_interval = 32, so_den_pow = 40;
  std::uint64_t so_seed = 0;
  bool so_exact = false;
  solve->add_option("--market", so_market, "market file")->required();
  solve->add_option("--step", so_step, "multiplicative step, rational");
  solve->add_option("--max-iters", so_iters, "iteration budget");
  solve->add_option("--eps", so_eps, "target clearing tolerance");
  solve->add_option("--trace", so_trace, "write per-iteration CSV here");
  solve->add_option("--certify-interval", so_interval,
                    "iterations between certification attempts");
  solve->add_option("--den-bound-pow", so_den_pow,
                    "price denominators capped at 2^k");
  solve->add_option("--min-price", so_min_price, "price floor, rational");
  solve->add_option("--seed", so_seed, "restart perturbation seed");
  solve->add_option("--initial", so_initial, "initial prices file or inline");
  solve->add_flag("--exact", so_exact, "certify in exact mode");

  // roundtrip
  auto* roundtrip = app.add_subcommand(
      "roundtrip", "certify reduced-market prices, decode, and nash-check");
  std::string rt_game, rt_prices, rt_eps_market, rt_eps_nash;
  roundtrip->add_option("--game", rt_game, "game file")->required();
  roundtrip->add_option("--prices", rt_prices, "prices file or inline [..]")
      ->required();
  roundtrip->add_option("--eps-market", rt_eps_market,
                        "market tolerance (default 1/n^21)");
  roundtrip->add_option("--eps-nash", rt_eps_nash,
                        "game tolerance (default 1/n^6)");

  // price-reg
  auto* preg = app.add_subcommand(
      "price-reg", "check the exact price-regulation bounds per pair");
  std::string pr_prices, pr_eps;
  int pr_pairs = 0;
  preg->add_option("--prices", pr_prices, "prices file or inline [..]")
      ->required();
  preg->add_option("--pairs", pr_pairs, "number of leading pairs to check")
      ->required();
  preg->add_option("--eps", pr_eps, "tolerance, rational in [0,1)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  Report rep;
  try {
    if (build_mn->parsed()) {
      fisher::Market m = fisher::build_price_regulating_market(mn_n);
      json mj = fisher::io::market_to_json(m);
      if (!mn_out.empty()) {
        fisher::io::write_file(mn_out, mj.dump(2) + "\n");
        rep.result = {{"written", mn_out},
                      {"goods", m.num_goods()},
                      {"buyers", m.num_buyers()}};
      } else {
        rep.result = {{"market", mj}};
      }
      rep.emit("build-mn");
      return kOk;
    }

    if (reduce->parsed()) {
      fisher::BimatrixGame g =
          fisher::io::game_from_json(load_json_file(red_game, "game", &rep));
      auto [m, meta] = fisher::build_reduction_market(g);
      json mj = fisher::io::market_to_json(m, &meta);
      if (!red_out.empty()) {
        fisher::io::write_file(red_out, mj.dump(2) + "\n");
        rep.result = {{"written", red_out},
                      {"goods", m.num_goods()},
                      {"buyers", m.num_buyers()}};
      } else {
        rep.result = {{"market", mj}};
      }
      rep.emit("reduce");
      return kOk;
    }

    if (certify->parsed()) {
      auto [m, meta] = fisher::io::market_from_json(
          load_json_file(cert_market, "market", &rep));
      (void)meta;
      fisher::PriceVector p = load_prices(cert_prices, &rep);
      Rat eps = Rat::parse(cert_eps);
      fisher::ClearingMode mode = cert_exact
                                      ? fisher::ClearingMode::exact
                                      : fisher::ClearingMode::approximate;
      fisher::CertifyResult res = fisher::certify_equilibrium(m, p, eps, mode);
      bool ok = fisher::certified(res);
      rep.result = ok ? certificate_json(std::get<fisher::Certificate>(res))
                      : refutation_json(std::get<fisher::Refutation>(res));
      rep.emit("certify");
      return ok ? kOk : kRefuted;
    }

    if (decode->parsed()) {
      auto [m, meta] = fisher::io::market_from_json(
          load_json_file(dec_market, "market", &rep));
      (void)m;
      if (!meta) {
        throw fisher::IoError(
            "market file carries no reduction meta; decode needs it");
      }
      fisher::PriceVector p = load_prices(dec_prices, &rep);
      std::optional<Rat> tol;
      if (!dec_tol.empty()) tol = Rat::parse(dec_tol);
      try {
        fisher::DecodedProfile d = fisher::decode_prices(p, meta->n, tol);
        rep.result = decoded_json(d);
        rep.emit("decode");
        return kOk;
      } catch (const fisher::DecodeError& e) {
        rep.result = {{"verdict", "decode_error"}, {"error", e.what()}};
        rep.emit("decode");
        return kRefuted;
      }
    }

    if (nash->parsed()) {
      fisher::BimatrixGame g =
          fisher::io::game_from_json(load_json_file(nash_game, "game", &rep));
      fisher::MixedProfile prof = fisher::io::profile_from_json(
          load_json_file(nash_profile, "profile", &rep));
      fisher::WellSupportedCheck ws =
          fisher::check_well_supported(g, prof, Rat::parse(nash_eps));
      rep.result = nash_check_json(ws);
      rep.emit("nash-check");
      return ws.ok ? kOk : kRefuted;
    }

    if (oracle->parsed()) {
      fisher::BimatrixGame g =
          fisher::io::game_from_json(load_json_file(or_game, "game", &rep));
      std::vector<fisher::MixedProfile> eqs =
          fisher::support_enumeration_nash(g, or_max_n);
      json list = json::array();
      for (const auto& e : eqs) list.push_back(fisher::io::profile_to_json(e));
      rep.result = {{"count", eqs.size()}, {"equilibria", list}};
      rep.emit("oracle-nash");
      return kOk;
    }

    if (solve->parsed()) {
      auto [m, meta] = fisher::io::market_from_json(
          load_json_file(so_market, "market", &rep));
      (void)meta;
      fisher::SolverConfig cfg;
      cfg.step = Rat::parse(so_step);
      cfg.max_iterations = so_iters;
      cfg.target_eps = Rat::parse(so_eps);
      cfg.certify_interval = so_interval;
      if (so_den_pow < 1 || so_den_pow > 4096) {
        throw std::invalid_argument("--den-bound-pow must be in [1, 4096]");
      }
      cfg.den_bound = fisher::int_pow(2, static_cast<unsigned>(so_den_pow));
      cfg.seed = so_seed;
      if (!so_min_price.empty()) cfg.min_price = Rat::parse(so_min_price);
      if (!so_initial.empty()) cfg.initial = load_prices(so_initial, &rep);
      if (so_exact) cfg.mode = fisher::ClearingMode::exact;
      fisher::SolverReport r = fisher::tatonnement(m, cfg);
      if (!so_trace.empty()) {
        std::string csv = "iteration,max_rel_excess,price_hash\n";
        for (const auto& s : r.trace) {
          char hash[17];
          std::snprintf(hash, sizeof hash, "%016llx",
                        static_cast<unsigned long long>(s.price_hash));
          csv += std::to_string(s.iteration) + "," + s.max_rel_excess.str() +
                 "," + hash + "\n";
        }
        fisher::io::write_file(so_trace, csv);
      }
      bool ok = r.outcome == fisher::SolverReport::Outcome::certified;
      rep.result = {{"outcome", ok ? "certified" : "exhausted"},
                    {"iterations", r.iterations_used},
                    {"restarts", r.restarts},
                    {"prices", rats_json(r.prices)},
                    {"best_residual", r.best_residual.str()}};
      if (ok) rep.result["certificate"] = certificate_json(*r.certificate);
      rep.emit("solve");
      return ok ? kOk : kRefuted;
    }

    if (roundtrip->parsed()) {
      fisher::BimatrixGame g =
          fisher::io::game_from_json(load_json_file(rt_game, "game", &rep));
      fisher::PriceVector p = load_prices(rt_prices, &rep);
      std::optional<Rat> em, en;
      if (!rt_eps_market.empty()) em = Rat::parse(rt_eps_market);
      if (!rt_eps_nash.empty()) en = Rat::parse(rt_eps_nash);
      fisher::RoundtripReport r = fisher::roundtrip_check(g, p, em, en);
      json jr{{"certified", r.certified},
              {"well_supported", r.well_supported},
              {"implication_holds", r.implication_holds()},
              {"band_within", r.band.within},
              {"max_ratio_below_three", r.ratio.below_three}};
      if (r.refutation) jr["refutation"] = refutation_json(*r.refutation);
      if (r.decoded) {
        jr["decoded"] = decoded_json(*r.decoded);
        jr["nash_check"] = nash_check_json(*r.nash_check);
      } else {
        jr["decode_error"] = r.decode_error;
      }
      rep.result = jr;
      rep.emit("roundtrip");
      return r.certified && r.well_supported ? kOk : kRefuted;
    }

    if (preg->parsed()) {
      fisher::PriceVector p = load_prices(pr_prices, &rep);
      fisher::PriceRegulationCheck c =
          fisher::check_price_regulation(p, pr_pairs, Rat::parse(pr_eps));
      json jr{{"ok", c.ok}};
      if (!c.ok) {
        static const char* kBound[] = {"none", "sum_low", "sum_high",
                                       "ratio_low", "ratio_high"};
        jr["pair"] = c.pair;
        jr["pair_display"] = c.pair + 1;
        jr["bound"] = kBound[static_cast<int>(c.bound)];
        jr["value"] = c.value.str();
      }
      rep.result = jr;
      rep.emit("price-reg");
      return c.ok ? kOk : kRefuted;
    }
  } catch (const fisher::IoError& e) {
    rep.result = {{"error", e.what()}};
    rep.emit(app.get_subcommands().front()->get_name());
    std::cerr << "error: " << e.what() << std::endl;
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    rep.result = {{"error", e.what()}};
    rep.emit(app.get_subcommands().front()->get_name());
    std::cerr << "error: " << e.what() << std::endl;
    return kInvalid;
  } catch (const std::domain_error& e) {
    rep.result = {{"error", e.what()}};
    rep.emit(app.get_subcommands().front()->get_name());
    std::cerr << "error: " << e.what() << std::endl;
    return kInvalid;
  } catch (const std::exception& e) {
    rep.result = {{"error", e.what()}};
    rep.emit(app.get_subcommands().front()->get_name());
    std::cerr << "error: " << e.what() << std::endl;
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
