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

#ifndef KPH_CONSTRUCTION_HPP_
#define KPH_CONSTRUCTION_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "kph/errors.hpp"
#include "kph/graph.hpp"
#include "kph/hierarchy.hpp"
#include "kph/score_matrix.hpp"
#include "kph/types.hpp"

namespace kph {

enum class Algorithm { kReducedForest, kTncf, kGreedy, kGreedyGs };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kReducedForest: return "reduced_forest";
    case Algorithm::kTncf: return "tncf";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kGreedyGs: return "greedy_gs";
  }
  return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kReducedForest, Algorithm::kTncf,
                      Algorithm::kGreedy, Algorithm::kGreedyGs})
    if (to_string(a) == name) return a;
  return std::nullopt;
}

struct ConstructionConfig {
  // Decision threshold over local scores; edge weights are s(i, j) - tau.
  double tau = 0.5;
  Algorithm algorithm = Algorithm::kTncf;
  // Upper bound on TNCF improvement passes.
  std::size_t max_passes = 100;
};

// Improvements smaller than this are treated as ties, so that re-evaluating
// the current structure through a different summation order never counts
// as progress.
inline constexpr double kImprovementEpsilon = 1e-12;

namespace detail {

inline void require_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw std::invalid_argument("tau must be in [0, 1], got " +
                                std::to_string(tau));
}

}  // namespace detail

// Sum of (s(x, y) - tau) over the relations induced by the forest.
inline double objective_value(const ClusterForest& f, const ScoreMatrix& s,
                              double tau) {
  double total = 0.0;
  for_each_relation(f, [&](std::size_t x, std::size_t y) {
    total += s(x, y) - tau;
  });
  return total;
}

// Id-space objective. Throws DataError if an induced relation has no score.
inline double objective_value(const Hierarchy& h, const ScoreMatrix& s,
                              double tau) {
  double total = 0.0;
  for (const auto& [x, y] : derive_relations(h)) total += s.at(x, y) - tau;
  return total;
}

// Average directional score from every member of `from` to every member
// of `to`. Clusters must be disjoint and nonempty.
inline double cluster_link_score(const std::vector<std::size_t>& from,
                                 const std::vector<std::size_t>& to,
                                 const ScoreMatrix& s) {
  if (from.empty() || to.empty())
    throw std::invalid_argument("cluster_link_score on an empty cluster");
  double sum = 0.0;
  for (std::size_t i : from)
    for (std::size_t j : to) {
      if (i == j)
        throw std::invalid_argument("cluster_link_score on overlapping "
                                    "clusters (key point " +
                                    s.id(i) + ")");
      sum += s(i, j);
    }
  return sum / (static_cast<double>(from.size()) *
                static_cast<double>(to.size()));
}

// ---------------------------------------------------------------------------
// Reduced forest

// Threshold graph (i -> j iff s(i, j) > tau), contracted into clusters,
// transitively reduced, and with a single parent kept per cluster: the
// largest candidate, then the highest mean child->parent score, then the
// lowest cluster index.
inline ClusterForest reduced_forest(const ScoreMatrix& s, double tau) {
  detail::require_tau(tau);
  const std::size_t n = s.size();
  DirectedGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && s(i, j) > tau) g.add_edge(i, j, s(i, j));

  Condensation cond = scc_condensation(g);
  DirectedGraph reduced = transitive_reduction(cond.dag);

  ClusterForest f;
  f.clusters = cond.members;
  f.parent.assign(f.clusters.size(), std::nullopt);
  for (std::size_t c = 0; c < f.clusters.size(); ++c) {
    const auto& arcs = reduced.out(c);
    if (arcs.empty()) continue;
    std::size_t best = arcs.front().to;
    double best_mean = cluster_link_score(f.clusters[c], f.clusters[best], s);
    for (const auto& a : arcs) {
      const std::size_t p = a.to;
      if (p == best) continue;
      const double mean = cluster_link_score(f.clusters[c], f.clusters[p], s);
      const std::size_t size_p = f.clusters[p].size();
      const std::size_t size_best = f.clusters[best].size();
      // arcs are sorted by target, so equal candidates keep the lower index
      if (size_p > size_best || (size_p == size_best && mean > best_mean)) {
        best = p;
        best_mean = mean;
      }
    }
    f.parent[c] = best;
  }
  f.canonicalize();
  return f;
}

// ---------------------------------------------------------------------------
// TNCF local search

struct TncfStats {
  std::size_t passes = 0;
  std::size_t node_moves = 0;
  std::size_t cluster_moves = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

namespace detail {

// Detaches a block of key points from the forest. For a node move the block
// is one key point; for a component move it is a whole cluster. A cluster
// left empty disappears and its children move up to its parent.
inline void detach(ClusterForest& f, const std::vector<std::size_t>& block) {
  for (std::size_t c = 0; c < f.size(); ++c) {
    auto& members = f.clusters[c];
    std::erase_if(members, [&](std::size_t x) {
      return std::find(block.begin(), block.end(), x) != block.end();
    });
    if (!members.empty()) continue;
    for (std::size_t d = 0; d < f.size(); ++d)
      if (f.parent[d] == c) f.parent[d] = f.parent[c];
    f.parent[c] = std::nullopt;
  }
}

struct Placement {
  enum Kind { kMerge, kChild, kRoot } kind = kRoot;
  std::size_t target = 0;
};

// Best re-attachment of `block` into `base` (which no longer contains it),
// by the objective gained from relations that involve the block. Ties keep
// the first candidate in order: merges, then children, then root, each by
// cluster index.
inline std::pair<Placement, double> best_placement(
    const ClusterForest& base, const std::vector<std::size_t>& block,
    const ScoreMatrix& s, double tau) {
  auto w = [&](std::size_t x, std::size_t y) { return s(x, y) - tau; };
  const std::size_t m = base.size();

  double intra = 0.0;
  for (std::size_t x : block)
    for (std::size_t y : block)
      if (x != y) intra += w(x, y);
  // out_to[c]: block -> cluster c; in_from[c]: cluster c -> block.
  std::vector<double> out_to(m, 0.0), in_from(m, 0.0);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t y : base.clusters[c])
      for (std::size_t x : block) {
        out_to[c] += w(x, y);
        in_from[c] += w(y, x);
      }
  // up[c]: block -> c and all ancestors of c.
  // down[c]: all strict descendants of c -> block.
  std::vector<double> up(m, 0.0), down(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    if (base.clusters[c].empty()) continue;
    up[c] = out_to[c];
    for (auto p = base.parent[c]; p; p = base.parent[*p]) {
      up[c] += out_to[*p];
      down[*p] += in_from[c];
    }
  }

  Placement best{Placement::kRoot, 0};
  double best_gain = intra;
  bool have = false;
  auto offer = [&](Placement p, double gain) {
    if (!have || gain > best_gain) {
      best = p;
      best_gain = gain;
      have = true;
    }
  };
  for (std::size_t c = 0; c < m; ++c) {
    if (base.clusters[c].empty()) continue;
    // Joining c: related to c's members both ways, to c's ancestors, and
    // from c's descendants.
    offer({Placement::kMerge, c},
          intra + out_to[c] + in_from[c] + (up[c] - out_to[c]) + down[c]);
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (base.clusters[c].empty()) continue;
    offer({Placement::kChild, c}, intra + up[c]);
  }
  offer({Placement::kRoot, 0}, intra);
  return {best, best_gain};
}

inline void apply_placement(ClusterForest& f,
                            const std::vector<std::size_t>& block,
                            const Placement& p) {
  switch (p.kind) {
    case Placement::kMerge:
      f.clusters[p.target].insert(f.clusters[p.target].end(), block.begin(),
                                  block.end());
      break;
    case Placement::kChild:
      f.clusters.push_back(block);
      f.parent.push_back(p.target);
      break;
    case Placement::kRoot:
      f.clusters.push_back(block);
      f.parent.push_back(std::nullopt);
      break;
  }
  f.canonicalize();
}

// Tries moving `block`; applies the best placement if it strictly improves
// the objective. Returns true when a move was applied.
inline bool try_move(ClusterForest& f, const std::vector<std::size_t>& block,
                     const ScoreMatrix& s, double tau, double& current) {
  ClusterForest base = f;
  detach(base, block);
  const double base_value = objective_value(base, s, tau);
  auto [placement, gain] = best_placement(base, block, s, tau);
  if (base_value + gain <= current + kImprovementEpsilon) return false;
  apply_placement(base, block, placement);
  f = std::move(base);
  current = objective_value(f, s, tau);
  return true;
}

}  // namespace detail

// Local search from the reduced forest. Each pass visits key points in
// index order (node moves), then clusters in index order (component
// moves); each visit removes the node or cluster, re-attaches it at its
// best position (inside an existing cluster, as a child of any cluster, or
// as a root) and keeps the move only if the objective strictly increases.
// Stops after a pass with no accepted move or after max_passes.
inline ClusterForest tncf_forest(const ScoreMatrix& s, double tau,
                                 std::size_t max_passes,
                                 TncfStats* stats = nullptr) {
  detail::require_tau(tau);
  if (max_passes < 1) throw std::invalid_argument("max_passes must be >= 1");
  ClusterForest f = reduced_forest(s, tau);
  double current = objective_value(f, s, tau);
  TncfStats local;
  local.initial_objective = current;
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    ++local.passes;
    bool improved = false;
    for (std::size_t x = 0; x < s.size(); ++x) {
      if (detail::try_move(f, {x}, s, tau, current)) {
        ++local.node_moves;
        improved = true;
      }
    }
    for (std::size_t c = 0; c < f.size(); ++c) {
      const std::vector<std::size_t> block = f.clusters[c];
      if (detail::try_move(f, block, s, tau, current)) {
        ++local.cluster_moves;
        improved = true;
      }
    }
    if (!improved) break;
  }
  local.final_objective = current;
  if (stats) *stats = local;
  return f;
}

// ---------------------------------------------------------------------------
// Greedy builders

// Average-linkage agglomerative clustering over the distance
// d(i, j) = 1 - min(s(i, j), s(j, i)). The closest pair of clusters is
// merged while its average distance is at most 1 - tau; ties go to the
// lowest (first, second) cluster index pair. Clusters are returned sorted,
// ordered by smallest member.
inline std::vector<std::vector<std::size_t>> agglomerative_cluster(
    const ScoreMatrix& s, double tau) {
  detail::require_tau(tau);
  const std::size_t n = s.size();
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
  auto distance = [&](std::size_t i, std::size_t j) {
    return 1.0 - std::min(s(i, j), s(j, i));
  };
  const double limit = 1.0 - tau;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < clusters.size(); ++a)
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double sum = 0.0;
        for (std::size_t i : clusters[a])
          for (std::size_t j : clusters[b]) sum += distance(i, j);
        const double avg = sum / static_cast<double>(clusters[a].size() *
                                                     clusters[b].size());
        if (avg < best) {
          best = avg;
          ba = a;
          bb = b;
        }
      }
    if (best > limit) break;
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(),
                        clusters[bb].end());
    std::sort(clusters[ba].begin(), clusters[ba].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  return clusters;
}

namespace detail {

struct ClusterEdgeCandidate {
  std::size_t child;
  std::size_t parent;
  double score;
};

inline std::vector<double> link_scores(
    const std::vector<std::vector<std::size_t>>& clusters,
    const ScoreMatrix& s) {
  const std::size_t m = clusters.size();
  std::vector<double> link(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (a != b) link[a * m + b] = cluster_link_score(clusters[a], clusters[b], s);
  return link;
}

inline std::vector<ClusterEdgeCandidate> candidates_above(
    const std::vector<double>& link, std::size_t m, double tau) {
  std::vector<ClusterEdgeCandidate> out;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (a != b && link[a * m + b] > tau) out.push_back({a, b, link[a * m + b]});
  return out;
}

// Legal iff child has no parent yet and parent is not in child's subtree.
inline bool can_attach(const ClusterForest& f, std::size_t child,
                       std::size_t parent) {
  if (f.parent[child]) return false;
  for (std::optional<std::size_t> p = parent; p; p = f.parent[*p])
    if (*p == child) return false;
  return true;
}

}  // namespace detail

// Clusters from agglomerative_cluster, then cluster edges added in
// descending link score (ties by child, then parent index) whenever the
// score exceeds tau and the result stays a forest.
inline ClusterForest greedy_forest(const ScoreMatrix& s, double tau) {
  ClusterForest f;
  f.clusters = agglomerative_cluster(s, tau);
  const std::size_t m = f.size();
  f.parent.assign(m, std::nullopt);
  const auto link = detail::link_scores(f.clusters, s);
  auto cands = detail::candidates_above(link, m, tau);
  std::stable_sort(cands.begin(), cands.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  for (const auto& e : cands)
    if (detail::can_attach(f, e.child, e.parent)) f.parent[e.child] = e.parent;
  return f;
}

// Sum over clusters of the link score towards each of their ancestors.
inline double ancestor_link_objective(const ClusterForest& f,
                                      const ScoreMatrix& s) {
  double total = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c)
    for (std::size_t a : f.ancestors(c))
      total += cluster_link_score(f.clusters[c], f.clusters[a], s);
  return total;
}

// Greedy edge addition over the candidate set of cluster edges scoring
// above tau, where each step adds the legal candidate that maximizes
// ancestor_link_objective of the resulting forest (ties by child, then
// parent index). Runs until no legal candidate remains.
inline ClusterForest greedy_gs_forest(const ScoreMatrix& s, double tau) {
  ClusterForest f;
  f.clusters = agglomerative_cluster(s, tau);
  const std::size_t m = f.size();
  f.parent.assign(m, std::nullopt);
  const auto link = detail::link_scores(f.clusters, s);
  std::vector<detail::ClusterEdgeCandidate> pending =
      detail::candidates_above(link, m, tau);

  while (true) {
    const auto children = f.children();
    std::optional<std::size_t> best;
    double best_gain = 0.0;
    for (std::size_t k = 0; k < pending.size(); ++k) {
      const auto& e = pending[k];
      if (!detail::can_attach(f, e.child, e.parent)) continue;
      // Every cluster in child's subtree gains parent and its ancestors.
      std::vector<std::size_t> upper{e.parent};
      for (std::size_t a : f.ancestors(e.parent)) upper.push_back(a);
      double gain = 0.0;
      std::vector<std::size_t> stack{e.child};
      while (!stack.empty()) {
        std::size_t d = stack.back();
        stack.pop_back();
        for (std::size_t a : upper) gain += link[d * m + a];
        for (std::size_t ch : children[d]) stack.push_back(ch);
      }
      if (!best || gain > best_gain) {
        best = k;
        best_gain = gain;
      }
    }
    if (!best) break;
    f.parent[pending[*best].child] = pending[*best].parent;
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(*best));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Hierarchy-level entry points

inline Hierarchy build_reduced_forest(const ScoreMatrix& s, double tau,
                                      Domain domain = Domain::kOther) {
  return to_hierarchy(reduced_forest(s, tau), s.ids(), s.summary_id(), domain);
}

inline Hierarchy build_tncf(const ScoreMatrix& s, double tau,
                            std::size_t max_passes = 100,
                            Domain domain = Domain::kOther,
                            TncfStats* stats = nullptr) {
  return to_hierarchy(tncf_forest(s, tau, max_passes, stats), s.ids(),
                      s.summary_id(), domain);
}

inline Hierarchy build_greedy(const ScoreMatrix& s, double tau,
                              Domain domain = Domain::kOther) {
  return to_hierarchy(greedy_forest(s, tau), s.ids(), s.summary_id(), domain);
}

inline Hierarchy build_greedy_gs(const ScoreMatrix& s, double tau,
                                 Domain domain = Domain::kOther) {
  return to_hierarchy(greedy_gs_forest(s, tau), s.ids(), s.summary_id(),
                      domain);
}

inline ClusterForest build_forest(const ScoreMatrix& s,
                                  const ConstructionConfig& config) {
  switch (config.algorithm) {
    case Algorithm::kReducedForest: return reduced_forest(s, config.tau);
    case Algorithm::kTncf:
      return tncf_forest(s, config.tau, config.max_passes);
    case Algorithm::kGreedy: return greedy_forest(s, config.tau);
    case Algorithm::kGreedyGs: return greedy_gs_forest(s, config.tau);
  }
  throw std::invalid_argument("unknown algorithm");
}

inline Hierarchy build_hierarchy(const ScoreMatrix& s,
                                 const ConstructionConfig& config,
                                 Domain domain = Domain::kOther) {
  return to_hierarchy(build_forest(s, config), s.ids(), s.summary_id(),
                      domain);
}

}  // namespace kph

#endif  // KPH_CONSTRUCTION_HPP_
