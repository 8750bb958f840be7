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

#ifndef KPH_TESTS_ORACLES_HPP_
#define KPH_TESTS_ORACLES_HPP_

// Independent reference implementations used only by tests. None of these
// call into the library code paths they are used to check.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kph/graph.hpp"
#include "kph/hierarchy.hpp"
#include "kph/score_matrix.hpp"
#include "kph/types.hpp"

namespace kph::oracle {

using Matrix = std::vector<std::vector<bool>>;

inline Matrix floyd_warshall(Matrix adj) {
  const std::size_t n = adj.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (adj[i][k] && adj[k][j]) adj[i][j] = true;
  return adj;
}

inline Matrix adjacency(const DirectedGraph& g) {
  Matrix adj(g.node_count(), std::vector<bool>(g.node_count(), false));
  for (auto [u, v] : g.edges()) adj[u][v] = true;
  return adj;
}

// Transitive closure of key point links: co-clustered pairs both ways and
// every member of a child cluster to every member of its parent.
inline std::set<std::pair<std::string, std::string>> closure_relations(
    const Hierarchy& h) {
  std::vector<std::string> ids;
  std::map<std::string, std::size_t> where;
  std::vector<std::size_t> cluster_of;
  for (std::size_t c = 0; c < h.clusters.size(); ++c)
    for (const auto& id : h.clusters[c]) {
      where[id] = ids.size();
      ids.push_back(id);
      cluster_of.push_back(c);
    }
  const std::size_t n = ids.size();
  Matrix adj(n, std::vector<bool>(n, false));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (cluster_of[x] == cluster_of[y]) adj[x][y] = true;
  for (const auto& e : h.edges)
    for (const auto& a : h.clusters[e.child])
      for (const auto& b : h.clusters[e.parent]) adj[where[a]][where[b]] = true;
  adj = floyd_warshall(adj);
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y && adj[x][y]) out.emplace(ids[x], ids[y]);
  return out;
}

inline std::vector<std::string> make_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("k" + std::to_string(i));
  return ids;
}

// Random forest over n key points: random partition, then each cluster
// (in a random order) picks a parent among the clusters before it, or none.
inline Hierarchy random_hierarchy(std::mt19937_64& rng, std::size_t n) {
  auto ids = make_ids(n);
  std::shuffle(ids.begin(), ids.end(), rng);
  Hierarchy h;
  h.summary_id = "random";
  std::uniform_int_distribution<std::size_t> blocks(1, std::max<std::size_t>(n, 1));
  const std::size_t m = n == 0 ? 0 : blocks(rng);
  h.clusters.assign(m, {});
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = i < m ? i : std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
    h.clusters[c].push_back(ids[i]);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t k = 1; k < m; ++k) {
    if (std::bernoulli_distribution(0.3)(rng)) continue;
    std::size_t p = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    h.edges.push_back({order[k], order[p]});
  }
  return h;
}

inline DirectedGraph random_graph(std::mt19937_64& rng, std::size_t n,
                                  double density, bool acyclic) {
  DirectedGraph g(n);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution coin(density);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b || !coin(rng)) continue;
      // Acyclic graphs only point forward in the random permutation.
      if (acyclic && perm[a] >= perm[b]) continue;
      g.add_edge(a, b, 1.0);
    }
  return g;
}

inline ScoreMatrix random_scores(std::mt19937_64& rng, std::size_t n,
                                 std::string summary_id = "random") {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return ScoreMatrix::from_function(std::move(summary_id), make_ids(n),
                                    [&](std::size_t, std::size_t) { return u(rng); });
}

// ---------------------------------------------------------------------------
// Distributional scorers written straight from their formulas with sets.

inline std::set<std::size_t> support(const std::vector<double>& w, double theta) {
  std::set<std::size_t> s;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] >= theta) s.insert(i);
  return s;
}

inline double bininc(const std::vector<double>& wi, const std::vector<double>& wj,
                     double theta) {
  auto si = support(wi, theta), sj = support(wj, theta);
  if (si.empty()) return 0.0;
  std::vector<std::size_t> both;
  std::set_intersection(si.begin(), si.end(), sj.begin(), sj.end(),
                        std::back_inserter(both));
  return double(both.size()) / double(si.size());
}

inline double weedsprec(const std::vector<double>& wi,
                        const std::vector<double>& wj, double theta) {
  auto si = support(wi, theta), sj = support(wj, theta);
  double num = 0, den = 0;
  for (auto f : si) {
    den += wi[f];
    if (sj.count(f)) num += wi[f];
  }
  return den == 0 ? 0.0 : num / den;
}

inline double clarkede(const std::vector<double>& wi,
                       const std::vector<double>& wj, double theta) {
  auto si = support(wi, theta), sj = support(wj, theta);
  double num = 0, den = 0;
  for (auto f : si) {
    den += wi[f];
    if (sj.count(f)) num += std::min(wi[f], wj[f]);
  }
  return den == 0 ? 0.0 : num / den;
}

inline double apinc(const std::vector<double>& wi, const std::vector<double>& wj,
                    double theta) {
  auto si = support(wi, theta), sj = support(wj, theta);
  if (si.empty()) return 0.0;
  auto ranked = [](const std::set<std::size_t>& s, const std::vector<double>& w) {
    std::vector<std::pair<double, std::size_t>> v;
    for (auto f : s) v.emplace_back(-w[f], f);
    std::sort(v.begin(), v.end());
    std::vector<std::size_t> out;
    for (auto& [neg, f] : v) out.push_back(f);
    return out;
  };
  auto ri = ranked(si, wi), rj = ranked(sj, wj);
  std::map<std::size_t, std::size_t> rank_j;
  for (std::size_t r = 0; r < rj.size(); ++r) rank_j[rj[r]] = r + 1;
  double total = 0;
  for (std::size_t r = 1; r <= ri.size(); ++r) {
    std::size_t included = 0;
    for (std::size_t t = 0; t < r; ++t) included += sj.count(ri[t]);
    double p = double(included) / double(r);
    auto it = rank_j.find(ri[r - 1]);
    double rel = it == rank_j.end()
                     ? 0.0
                     : 1.0 - double(it->second) / double(sj.size() + 1);
    total += p * rel;
  }
  return total / double(si.size());
}

// ---------------------------------------------------------------------------
// Average-linkage clustering with the Lance-Williams update.

inline std::vector<std::set<std::size_t>> average_linkage(const ScoreMatrix& s,
                                                          double tau) {
  const std::size_t n = s.size();
  std::vector<std::set<std::size_t>> clusters;
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    clusters.push_back({i});
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d[i][j] = 1.0 - std::min(s(i, j), s(j, i));
  }
  std::vector<bool> alive(n, true);
  while (true) {
    double best = 2.0;
    std::size_t ba = n, bb = n;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (alive[a] && alive[b] && d[a][b] < best) {
          best = d[a][b];
          ba = a;
          bb = b;
        }
    if (ba == n || best > 1.0 - tau) break;
    const double na = double(clusters[ba].size()), nb = double(clusters[bb].size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == ba || k == bb) continue;
      d[ba][k] = d[k][ba] = (na * d[ba][k] + nb * d[bb][k]) / (na + nb);
    }
    clusters[ba].insert(clusters[bb].begin(), clusters[bb].end());
    alive[bb] = false;
  }
  std::vector<std::set<std::size_t>> out;
  for (std::size_t k = 0; k < n; ++k)
    if (alive[k]) out.push_back(clusters[k]);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive forest search by recursive assignment, scored through the
// closure oracle. Slow; for n <= 4.

inline double closure_objective(const Hierarchy& h, const ScoreMatrix& s,
                                double tau) {
  double total = 0.0;
  for (const auto& [x, y] : closure_relations(h)) total += s.at(x, y) - tau;
  return total;
}

inline double exhaustive_optimum(const ScoreMatrix& s, double tau) {
  const std::size_t n = s.size();
  double best = -1e300;
  std::vector<std::size_t> block(n, 0);
  std::function<void(std::size_t, std::size_t)> partition =
      [&](std::size_t i, std::size_t used) {
        if (i == n) {
          Hierarchy h;
          h.clusters.assign(used, {});
          for (std::size_t x = 0; x < n; ++x)
            h.clusters[block[x]].push_back(s.id(x));
          std::vector<std::size_t> par(used, used);
          std::function<void(std::size_t)> parents = [&](std::size_t c) {
            if (c == used) {
              for (std::size_t k = 0; k < used; ++k) {
                std::size_t steps = 0;
                for (std::size_t q = par[k]; q != used; q = par[q])
                  if (++steps > used) return;  // cycle
              }
              Hierarchy g = h;
              for (std::size_t k = 0; k < used; ++k)
                if (par[k] != used) g.edges.push_back({k, par[k]});
              best = std::max(best, closure_objective(g, s, tau));
              return;
            }
            for (std::size_t p = 0; p <= used; ++p) {
              if (p == c) continue;
              par[c] = p;
              parents(c + 1);
            }
          };
          parents(0);
          return;
        }
        for (std::size_t b = 0; b <= used; ++b) {
          block[i] = b;
          partition(i + 1, b == used ? used + 1 : used);
        }
      };
  partition(0, 0);
  return best;
}

}  // namespace kph::oracle

#endif  // KPH_TESTS_ORACLES_HPP_
