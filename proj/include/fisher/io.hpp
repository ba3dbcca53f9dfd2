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

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fisher/demand.hpp"
#include "fisher/games.hpp"
#include "fisher/market.hpp"
#include "fisher/reduction.hpp"

// File formats. All rationals cross files as canonical "p/q" strings and
// all indices in files are zero-based (display strings are one-based).
//
//   curve    {"slopes": ["4/1", "1/1"], "breakpoints": ["1/1"]}
//   market   {"goods": [{"supply": "1/1"}, ...],
//             "buyers": [{"money": "3/1", "label": "T_1",
//                         "valuations": {"0": <curve>, ...}}, ...],
//             "meta": <reduction meta, optional>}
//   game     {"A": [["1/1", ...], ...], "B": [...]}            (dense)
//            {"n": 12, "A": [[i, j, "v"], ...], "B": [...]}    (sparse)
//   prices   {"prices": ["1/1", ...]}  or a bare array
//   profile  {"x": ["1/2", ...], "y": [...]}

namespace fisher {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io {

using json = nlohmann::json;

// Missing keys and type mismatches surface as IoError, not json exceptions.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw IoError(std::string(what) + ": " + e.what());
  }
}

inline json rat_to_json(const Rat& r) { return r.str(); }

inline Rat rat_from_json(const json& j, const char* what) {
  if (!j.is_string()) {
    throw IoError(std::string(what) + ": rationals must be \"p/q\" strings");
  }
  try {
    return Rat::parse(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string(what) + ": " + e.what());
  }
}

inline json rat_vec_to_json(const std::vector<Rat>& v) {
  json a = json::array();
  for (const Rat& r : v) a.push_back(rat_to_json(r));
  return a;
}

inline std::vector<Rat> rat_vec_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw IoError(std::string(what) + ": expected an array");
  std::vector<Rat> v;
  v.reserve(j.size());
  for (const json& e : j) v.push_back(rat_from_json(e, what));
  return v;
}

inline json curve_to_json(const PlcCurve& c) {
  return json{{"slopes", rat_vec_to_json(c.slopes())},
              {"breakpoints", rat_vec_to_json(c.breakpoints())}};
}

inline PlcCurve curve_from_json(const json& j) {
  if (!j.is_object() || !j.contains("slopes")) {
    throw IoError("curve: expected {\"slopes\": ..., \"breakpoints\": ...}");
  }
  std::vector<Rat> slopes = rat_vec_from_json(j.at("slopes"), "curve slopes");
  std::vector<Rat> breaks =
      j.contains("breakpoints")
          ? rat_vec_from_json(j.at("breakpoints"), "curve breakpoints")
          : std::vector<Rat>{};
  PlcValidation v = validate_plc(slopes, breaks);
  if (!v.ok) throw IoError("curve: " + v.violation);
  return PlcCurve(std::move(slopes), std::move(breaks));
}

inline json gadget_to_json(const GadgetInfo& g) {
  return json{{"i", g.i},
              {"j", g.j},
              {"diff", rat_vec_to_json(g.diff)},
              {"money", rat_to_json(g.money)},
              {"aux", rat_vec_to_json(g.aux)}};
}

inline GadgetInfo gadget_from_json(const json& j) {
  return guarded("gadget", [&] {
    GadgetInfo g;
    g.i = j.at("i").get<int>();
    g.j = j.at("j").get<int>();
    g.diff = rat_vec_from_json(j.at("diff"), "gadget diff");
    g.money = rat_from_json(j.at("money"), "gadget money");
    g.aux = rat_vec_from_json(j.at("aux"), "gadget aux");
    g.diff_sum = Rat(0);
    for (std::size_t k = 0; k < g.diff.size(); ++k) {
      g.diff_sum += g.diff[k];
      if (!g.diff[k].is_zero()) g.nonzero.push_back(static_cast<int>(k));
    }
    return g;
  });
}

inline json meta_to_json(const ReductionMeta& meta) {
  json u = json::array(), v = json::array();
  for (const GadgetInfo& g : meta.u_gadgets) u.push_back(gadget_to_json(g));
  for (const GadgetInfo& g : meta.v_gadgets) v.push_back(gadget_to_json(g));
  return json{{"n", meta.n}, {"u_gadgets", u}, {"v_gadgets", v}};
}

inline ReductionMeta meta_from_json(const json& j) {
  return guarded("meta", [&] {
    ReductionMeta meta;
    meta.n = j.at("n").get<int>();
    for (const json& g : j.at("u_gadgets")) {
      meta.u_gadgets.push_back(gadget_from_json(g));
    }
    for (const json& g : j.at("v_gadgets")) {
      meta.v_gadgets.push_back(gadget_from_json(g));
    }
    return meta;
  });
}

inline json market_to_json(const Market& m,
                           const ReductionMeta* meta = nullptr) {
  json goods = json::array();
  for (const Good& g : m.goods) {
    goods.push_back(json{{"supply", rat_to_json(g.supply)}});
  }
  json buyers = json::array();
  for (const Buyer& b : m.buyers) {
    json vals = json::object();
    for (const auto& [idx, curve] : b.valuations) {
      vals[std::to_string(idx)] = curve_to_json(curve);
    }
    buyers.push_back(json{{"money", rat_to_json(b.money)},
                          {"label", b.label},
                          {"valuations", vals}});
  }
  json out{{"goods", goods}, {"buyers", buyers}};
  if (meta != nullptr) out["meta"] = meta_to_json(*meta);
  return out;
}

inline std::pair<Market, std::optional<ReductionMeta>> market_from_json(
    const json& j) {
  return guarded("market", [&]() -> std::pair<Market,
                                              std::optional<ReductionMeta>> {
    if (!j.is_object() || !j.contains("goods") || !j.contains("buyers")) {
      throw IoError("market: expected {\"goods\": ..., \"buyers\": ...}");
    }
    Market m;
    for (const json& g : j.at("goods")) {
      m.goods.push_back(Good{rat_from_json(g.at("supply"), "good supply")});
    }
    for (const json& b : j.at("buyers")) {
      Buyer buyer;
      buyer.money = rat_from_json(b.at("money"), "buyer money");
      if (b.contains("label")) buyer.label = b.at("label").get<std::string>();
      if (b.contains("valuations")) {
        for (const auto& [key, curve] : b.at("valuations").items()) {
          int idx = 0;
          try {
            idx = std::stoi(key);
          } catch (const std::exception&) {
            throw IoError("market: valuation key '" + key +
                          "' is not a good index");
          }
          buyer.valuations.emplace(idx, curve_from_json(curve));
        }
      }
      m.buyers.push_back(std::move(buyer));
    }
    try {
      assert_well_formed(m);
    } catch (const std::invalid_argument& e) {
      throw IoError(std::string("market: ") + e.what());
    }
    std::optional<ReductionMeta> meta;
    if (j.contains("meta")) meta = meta_from_json(j.at("meta"));
    return {std::move(m), std::move(meta)};
  });
}

inline json game_to_json(const BimatrixGame& g) {
  json A = json::array(), B = json::array();
  for (const auto& row : g.A) A.push_back(rat_vec_to_json(row));
  for (const auto& row : g.B) B.push_back(rat_vec_to_json(row));
  return json{{"A", A}, {"B", B}};
}

inline BimatrixGame game_from_json(const json& j) {
  return guarded("game", [&] {
    if (!j.is_object() || !j.contains("A") || !j.contains("B")) {
      throw IoError("game: expected {\"A\": ..., \"B\": ...}");
    }
    BimatrixGame g;
    if (j.contains("n")) {
      // Sparse triplet form.
      const int n = j.at("n").get<int>();
      if (n < 1) throw IoError("game: n must be positive");
      g.A.assign(n, std::vector<Rat>(n, Rat(0)));
      g.B.assign(n, std::vector<Rat>(n, Rat(0)));
      auto fill = [&](const json& arr, std::vector<std::vector<Rat>>* mat,
                      const char* what) {
        for (const json& t : arr) {
          if (!t.is_array() || t.size() != 3) {
            throw IoError(std::string(what) +
                          ": entries must be [i, j, \"v\"]");
          }
          int r = t[0].get<int>(), c = t[1].get<int>();
          if (r < 0 || r >= n || c < 0 || c >= n) {
            throw IoError(std::string(what) + ": index out of range");
          }
          (*mat)[r][c] = rat_from_json(t[2], what);
        }
      };
      fill(j.at("A"), &g.A, "game A");
      fill(j.at("B"), &g.B, "game B");
    } else {
      auto fill = [&](const json& arr, std::vector<std::vector<Rat>>* mat,
                      const char* what) {
        for (const json& row : arr) {
          mat->push_back(rat_vec_from_json(row, what));
        }
      };
      fill(j.at("A"), &g.A, "game A");
      fill(j.at("B"), &g.B, "game B");
    }
    try {
      g.check();
    } catch (const std::invalid_argument& e) {
      throw IoError(std::string("game: ") + e.what());
    }
    return g;
  });
}

// Diagnostic shape only; profiles are never read back from files.
inline json demand_profile_to_json(const DemandProfile& d) {
  json edges = json::array();
  for (const TieEdge& e : d.tie_edges) {
    edges.push_back(json{{"good", e.good},
                         {"capacity_units", e.capacity_units
                                                ? json(e.capacity_units->str())
                                                : json()}});
  }
  return json{{"mandatory", rat_vec_to_json(d.mandatory)},
              {"tie_ratio", d.tie_ratio ? json(d.tie_ratio->str()) : json()},
              {"tie_edges", edges},
              {"leftover_money", rat_to_json(d.leftover_money)},
              {"satiated", d.satiated},
              {"surplus", rat_to_json(d.surplus)},
              {"free_goods", d.free_goods},
              {"mandatory_cost", rat_to_json(d.mandatory_cost)}};
}

inline json prices_to_json(const PriceVector& p) {
  return json{{"prices", rat_vec_to_json(p)}};
}

inline PriceVector prices_from_json(const json& j) {
  if (j.is_array()) return rat_vec_from_json(j, "prices");
  if (j.is_object() && j.contains("prices")) {
    return rat_vec_from_json(j.at("prices"), "prices");
  }
  throw IoError("prices: expected an array or {\"prices\": [...]}");
}

inline json profile_to_json(const MixedProfile& p) {
  return json{{"x", rat_vec_to_json(p.x)}, {"y", rat_vec_to_json(p.y)}};
}

inline MixedProfile profile_from_json(const json& j) {
  if (!j.is_object() || !j.contains("x") || !j.contains("y")) {
    throw IoError("profile: expected {\"x\": ..., \"y\": ...}");
  }
  return {rat_vec_from_json(j.at("x"), "profile x"),
          rat_vec_from_json(j.at("y"), "profile y")};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << bytes;
  if (!out.flush()) throw IoError("short write to " + path);
}

inline json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError(what + ": invalid JSON");
  return j;
}

inline std::string digest_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace io
}  // namespace fisher
