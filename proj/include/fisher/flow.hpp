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

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fisher/rational.hpp"

namespace fisher {

// Capacity that may be infinite. Infinity stays symbolic; it is never
// approximated by a large number.
struct Cap {
  std::optional<Rat> value;  // nullopt = infinite
  static Cap inf() { return {}; }
  static Cap of(Rat v) { return {std::move(v)}; }
  bool infinite() const { return !value.has_value(); }
};

namespace detail {

// Edmonds-Karp max flow over exact rationals with optional infinite
// capacities. The augmentation count is bounded by O(V * E) independent of
// capacity values, so exact arithmetic terminates.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1) {}

  int add_edge(int u, int v, Cap cap) {
    int id = static_cast<int>(edges_.size());
    edges_.push_back({v, head_[u], std::move(cap), Rat(0)});
    head_[u] = id;
    edges_.push_back({u, head_[v], Cap::of(Rat(0)), Rat(0)});
    head_[v] = id + 1;
    return id;
  }

  Rat flow_on(int edge_id) const { return edges_[edge_id].flow; }

  // Runs to completion; returns total flow from s to t.
  Rat run(int s, int t) {
    Rat total(0);
    std::vector<int> via(head_.size());
    for (;;) {
      std::fill(via.begin(), via.end(), -1);
      via[s] = -2;
      std::deque<int> q{s};
      while (!q.empty() && via[t] == -1) {
        int u = q.front();
        q.pop_front();
        for (int e = head_[u]; e != -1; e = edges_[e].next) {
          int v = edges_[e].to;
          if (via[v] != -1 || !has_residual(e)) continue;
          via[v] = e;
          q.push_back(v);
        }
      }
      if (via[t] == -1) break;
      // Bottleneck along the path; source-side edges are finite in every
      // instance we build, so a fully infinite path cannot occur.
      std::optional<Rat> bottleneck;
      for (int v = t; v != s;) {
        int e = via[v];
        std::optional<Rat> r = residual(e);
        if (r && (!bottleneck || *r < *bottleneck)) bottleneck = *r;
        v = edges_[e ^ 1].to;
      }
      if (!bottleneck) throw std::logic_error("unbounded augmenting path");
      for (int v = t; v != s;) {
        int e = via[v];
        edges_[e].flow += *bottleneck;
        edges_[e ^ 1].flow -= *bottleneck;
        v = edges_[e ^ 1].to;
      }
      total += *bottleneck;
    }
    last_reachable_.assign(head_.size(), false);
    mark_reachable(s);
    return total;
  }

  // Source side of the min cut after run().
  const std::vector<bool>& reachable() const { return last_reachable_; }

 private:
  struct Edge {
    int to;
    int next;
    Cap cap;
    Rat flow;
  };

  std::optional<Rat> residual(int e) const {
    if (edges_[e].cap.infinite()) return std::nullopt;
    return *edges_[e].cap.value - edges_[e].flow;
  }
  bool has_residual(int e) const {
    if (edges_[e].cap.infinite()) return true;
    return edges_[e].flow < *edges_[e].cap.value;
  }

  void mark_reachable(int s) {
    std::deque<int> q{s};
    last_reachable_[s] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        int v = edges_[e].to;
        if (!last_reachable_[v] && has_residual(e)) {
          last_reachable_[v] = true;
          q.push_back(v);
        }
      }
    }
  }

  std::vector<int> head_;
  std::vector<Edge> edges_;
  std::vector<bool> last_reachable_;
};

}  // namespace detail

// Money-unit transportation feasibility: buyers supply money within
// [supply_lo, supply_hi], edges carry money up to their capacities, and each
// good must receive inflow inside [good_lo, good_hi].
struct ClearingInstance {
  struct Edge {
    int buyer;
    int good;
    Cap capacity;  // money units
  };
  std::vector<Rat> supply_lo;  // per buyer; lo == hi for unsatiated buyers
  std::vector<Rat> supply_hi;
  std::vector<Edge> edges;
  std::vector<Rat> good_lo;  // required inflow interval per good, money units
  std::vector<Rat> good_hi;

  int num_buyers() const { return static_cast<int>(supply_lo.size()); }
  int num_goods() const { return static_cast<int>(good_lo.size()); }

  void check() const {
    if (supply_lo.size() != supply_hi.size() ||
        good_lo.size() != good_hi.size()) {
      throw std::invalid_argument("clearing instance dimension mismatch");
    }
    for (int i = 0; i < num_buyers(); ++i) {
      if (supply_lo[i].sign() < 0 || supply_lo[i] > supply_hi[i]) {
        throw std::invalid_argument("bad buyer supply interval");
      }
    }
    for (int j = 0; j < num_goods(); ++j) {
      if (good_lo[j].sign() < 0 || good_lo[j] > good_hi[j]) {
        throw std::invalid_argument("bad good inflow interval");
      }
    }
    for (const Edge& e : edges) {
      if (e.buyer < 0 || e.buyer >= num_buyers() || e.good < 0 ||
          e.good >= num_goods()) {
        throw std::invalid_argument("edge endpoint out of range");
      }
      if (!e.capacity.infinite() && e.capacity.value->sign() < 0) {
        throw std::invalid_argument("negative edge capacity");
      }
    }
  }
};

struct FlowAssignment {
  std::vector<Rat> edge_flow;  // money on each instance edge, same order
};

struct FlowInfeasible {
  Rat deficit;  // lower-bound mass that cannot be routed
  std::vector<int> cut_buyers;  // buyers on the source side of the cut
  std::vector<int> cut_goods;   // goods on the source side of the cut
};

using TransportResult = std::variant<FlowAssignment, FlowInfeasible>;

// Decides feasibility by the standard reduction of lower bounds to plain max
// flow: subtract lower bounds into node imbalances, wire a super source and
// super sink against the imbalances, close the circulation with an infinite
// return edge, and check that the super-source edges saturate.
inline TransportResult feasible_transport(const ClearingInstance& inst) {
  inst.check();
  const int nb = inst.num_buyers();
  const int ng = inst.num_goods();
  // Node ids: 0 = source, 1 = sink, buyers, goods, then super source/sink.
  const int S = 0, T = 1;
  const auto B = [&](int i) { return 2 + i; };
  const auto G = [&](int j) { return 2 + nb + j; };
  const int SS = 2 + nb + ng, TT = SS + 1;
  detail::MaxFlow mf(TT + 1);

  std::vector<Rat> excess(TT + 1, Rat(0));
  auto bounded_edge = [&](int u, int v, const Rat& lo, Cap hi) {
    Rat room = hi.infinite() ? Rat(0) : *hi.value - lo;
    if (!hi.infinite() && room.sign() < 0) {
      throw std::invalid_argument("edge with lower bound above capacity");
    }
    int id = mf.add_edge(u, v, hi.infinite() ? Cap::inf() : Cap::of(room));
    excess[v] += lo;
    excess[u] -= lo;
    return id;
  };

  for (int i = 0; i < nb; ++i) {
    bounded_edge(S, B(i), inst.supply_lo[i], Cap::of(inst.supply_hi[i]));
  }
  std::vector<int> edge_ids;
  edge_ids.reserve(inst.edges.size());
  for (const auto& e : inst.edges) {
    edge_ids.push_back(bounded_edge(B(e.buyer), G(e.good), Rat(0), e.capacity));
  }
  for (int j = 0; j < ng; ++j) {
    bounded_edge(G(j), T, inst.good_lo[j], Cap::of(inst.good_hi[j]));
  }
  mf.add_edge(T, S, Cap::inf());

  Rat need(0);
  for (int v = 0; v <= TT; ++v) {
    if (v == SS || v == TT) continue;
    if (excess[v].sign() > 0) {
      mf.add_edge(SS, v, Cap::of(excess[v]));
      need += excess[v];
    } else if (excess[v].sign() < 0) {
      mf.add_edge(v, TT, Cap::of(-excess[v]));
    }
  }

  Rat pushed = mf.run(SS, TT);
  if (pushed < need) {
    FlowInfeasible inf;
    inf.deficit = need - pushed;
    const std::vector<bool>& reach = mf.reachable();
    for (int i = 0; i < nb; ++i) {
      if (reach[B(i)]) inf.cut_buyers.push_back(i);
    }
    for (int j = 0; j < ng; ++j) {
      if (reach[G(j)]) inf.cut_goods.push_back(j);
    }
    return inf;
  }
  FlowAssignment fa;
  fa.edge_flow.reserve(edge_ids.size());
  for (int id : edge_ids) fa.edge_flow.push_back(mf.flow_on(id));
  return fa;
}

}  // namespace fisher
