// Copyright 2026 The KPH Authors.
//
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

#ifndef KPH_GRAPH_HPP_
#define KPH_GRAPH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kph/errors.hpp"

namespace kph {

// Weighted directed graph over nodes 0..n-1. No parallel edges, no
// self-loops, finite weights.
class DirectedGraph {
 public:
  struct Arc {
    std::size_t to = 0;
    double weight = 1.0;
  };

  explicit DirectedGraph(std::size_t node_count = 0) : out_(node_count) {}

  std::size_t node_count() const { return out_.size(); }

  std::size_t edge_count() const {
    std::size_t m = 0;
    for (const auto& arcs : out_) m += arcs.size();
    return m;
  }

  void add_edge(std::size_t from, std::size_t to, double weight = 1.0) {
    if (from >= node_count() || to >= node_count())
      throw std::out_of_range("edge endpoint out of range");
    if (from == to) throw std::invalid_argument("self-loop on node " +
                                                std::to_string(from));
    if (!std::isfinite(weight))
      throw std::invalid_argument("non-finite edge weight");
    auto& arcs = out_[from];
    auto it = std::lower_bound(
        arcs.begin(), arcs.end(), to,
        [](const Arc& a, std::size_t v) { return a.to < v; });
    if (it != arcs.end() && it->to == to)
      throw std::invalid_argument("parallel edge " + std::to_string(from) +
                                  "->" + std::to_string(to));
    arcs.insert(it, Arc{to, weight});
  }

  std::optional<double> weight(std::size_t from, std::size_t to) const {
    for (const Arc& a : out_[from])
      if (a.to == to) return a.weight;
    return std::nullopt;
  }

  bool has_edge(std::size_t from, std::size_t to) const {
    return weight(from, to).has_value();
  }

  // Outgoing arcs sorted by target.
  const std::vector<Arc>& out(std::size_t u) const { return out_[u]; }

  // All edges as (from, to), lexicographically sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t u = 0; u < out_.size(); ++u)
      for (const Arc& a : out_[u]) e.emplace_back(u, a.to);
    return e;
  }

 private:
  std::vector<std::vector<Arc>> out_;
};

// reach[u][v] is true iff there is a path of length >= 1 from u to v.
inline std::vector<std::vector<bool>> reachability(const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    stack.assign(1, s);
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (const auto& a : g.out(u)) {
        if (reach[s][a.to]) continue;
        reach[s][a.to] = true;
        stack.push_back(a.to);
      }
    }
  }
  return reach;
}

struct Condensation {
  DirectedGraph dag;
  // component_of[node] -> component index.
  std::vector<std::size_t> component_of;
  // members[component] -> nodes, ascending.
  std::vector<std::vector<std::size_t>> members;
};

// Contracts every strongly connected component into one vertex (Tarjan).
// Components are numbered by their smallest member; an edge between two
// components carries the summed weight of the edges it replaces.
inline Condensation scc_condensation(const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), raw_comp(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t next_index = 0, raw_count = 0;

  struct Frame {
    std::size_t node;
    std::size_t arc;
  };
  std::vector<Frame> call;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& arcs = g.out(f.node);
      if (f.arc < arcs.size()) {
        std::size_t v = arcs[f.arc++].to;
        if (index[v] == kUnvisited) {
          index[v] = low[v] = next_index++;
          stack.push_back(v);
          on_stack[v] = true;
          call.push_back({v, 0});
        } else if (on_stack[v]) {
          low[f.node] = std::min(low[f.node], index[v]);
        }
        continue;
      }
      std::size_t u = f.node;
      call.pop_back();
      if (!call.empty())
        low[call.back().node] = std::min(low[call.back().node], low[u]);
      if (low[u] == index[u]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          raw_comp[w] = raw_count;
        } while (w != u);
        ++raw_count;
      }
    }
  }

  // Renumber components by smallest member.
  std::vector<std::size_t> renumber(raw_count, kUnvisited);
  Condensation c;
  c.component_of.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t& id = renumber[raw_comp[v]];
    if (id == kUnvisited) {
      id = c.members.size();
      c.members.emplace_back();
    }
    c.component_of[v] = id;
    c.members[id].push_back(v);
  }

  const std::size_t m = c.members.size();
  std::vector<double> weight(m * m, 0.0);
  std::vector<bool> present(m * m, false);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& a : g.out(u)) {
      std::size_t cu = c.component_of[u], cv = c.component_of[a.to];
      if (cu == cv) continue;
      present[cu * m + cv] = true;
      weight[cu * m + cv] += a.weight;
    }
  }
  c.dag = DirectedGraph(m);
  for (std::size_t cu = 0; cu < m; ++cu)
    for (std::size_t cv = 0; cv < m; ++cv)
      if (present[cu * m + cv]) c.dag.add_edge(cu, cv, weight[cu * m + cv]);
  return c;
}

// Topological order (Kahn, smallest ready node first); nullopt if cyclic.
inline std::optional<std::vector<std::size_t>> topological_order(
    const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t u = 0; u < n; ++u)
    for (const auto& a : g.out(u)) ++indegree[a.to];
  std::vector<std::size_t> ready, order;
  for (std::size_t u = n; u-- > 0;)
    if (indegree[u] == 0) ready.push_back(u);
  while (!ready.empty()) {
    std::size_t u = ready.back();
    ready.pop_back();
    order.push_back(u);
    for (const auto& a : g.out(u)) {
      if (--indegree[a.to] == 0) {
        ready.push_back(a.to);
        std::sort(ready.begin(), ready.end(), std::greater<>());
      }
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

// Minimal edge subset of a DAG with the same reachability. Kept edges keep
// their weights. Throws StructuralError on cyclic input.
inline DirectedGraph transitive_reduction(const DirectedGraph& dag) {
  if (!topological_order(dag))
    throw StructuralError("transitive reduction requires an acyclic graph");
  const auto reach = reachability(dag);
  DirectedGraph reduced(dag.node_count());
  for (std::size_t u = 0; u < dag.node_count(); ++u) {
    for (const auto& a : dag.out(u)) {
      bool redundant = false;
      for (const auto& b : dag.out(u)) {
        if (b.to != a.to && reach[b.to][a.to]) {
          redundant = true;
          break;
        }
      }
      if (!redundant) reduced.add_edge(u, a.to, a.weight);
    }
  }
  return reduced;
}

}  // namespace kph

#endif  // KPH_GRAPH_HPP_
