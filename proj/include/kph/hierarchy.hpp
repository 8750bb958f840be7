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

#ifndef KPH_HIERARCHY_HPP_
#define KPH_HIERARCHY_HPP_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kph/errors.hpp"
#include "kph/types.hpp"

namespace kph {

// Index-space forest of clusters over key points 0..n-1. This is the working
// representation of the construction algorithms; Hierarchy is the
// id-space exchange form.
struct ClusterForest {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::optional<std::size_t>> parent;

  std::size_t size() const { return clusters.size(); }

  // Every key point in its own parentless cluster.
  static ClusterForest singletons(std::size_t n) {
    ClusterForest f;
    for (std::size_t i = 0; i < n; ++i) f.clusters.push_back({i});
    f.parent.assign(n, std::nullopt);
    return f;
  }

  // Parent path from c (exclusive) to its root. Assumes acyclic parents.
  std::vector<std::size_t> ancestors(std::size_t c) const {
    std::vector<std::size_t> out;
    for (auto p = parent[c]; p; p = parent[*p]) out.push_back(*p);
    return out;
  }

  std::vector<std::vector<std::size_t>> children() const {
    std::vector<std::vector<std::size_t>> ch(size());
    for (std::size_t c = 0; c < size(); ++c)
      if (parent[c]) ch[*parent[c]].push_back(c);
    return ch;
  }

  // Sorts members ascending, drops empty clusters, orders clusters by
  // smallest member and remaps parents. Canonical forms compare equal iff
  // the forests have the same clusters and the same edges.
  void canonicalize() {
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < size(); ++c) {
      std::sort(clusters[c].begin(), clusters[c].end());
      if (!clusters[c].empty()) order.push_back(c);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return clusters[a].front() < clusters[b].front();
    });
    std::vector<std::optional<std::size_t>> remap(size());
    for (std::size_t k = 0; k < order.size(); ++k) remap[order[k]] = k;
    ClusterForest out;
    for (std::size_t c : order) {
      out.clusters.push_back(std::move(clusters[c]));
      std::optional<std::size_t> p = parent[c];
      // A parent pointing at a dropped (empty) cluster is a caller bug.
      if (p && !remap[*p])
        throw InvariantError("cluster parent refers to an empty cluster");
      out.parent.push_back(p ? remap[*p] : std::nullopt);
    }
    *this = std::move(out);
  }

  friend bool operator==(const ClusterForest&, const ClusterForest&) = default;
};

// Calls fn(x, y) for every relation (x, y) induced by the forest: distinct
// co-clustered pairs in both directions, and every member of a cluster
// towards every member of each of its ancestors.
template <typename Fn>
void for_each_relation(const ClusterForest& f, Fn&& fn) {
  for (std::size_t c = 0; c < f.size(); ++c) {
    const auto& members = f.clusters[c];
    for (std::size_t x : members)
      for (std::size_t y : members)
        if (x != y) fn(x, y);
    for (auto p = f.parent[c]; p; p = f.parent[*p])
      for (std::size_t x : members)
        for (std::size_t y : f.clusters[*p]) fn(x, y);
  }
}

inline Hierarchy to_hierarchy(const ClusterForest& f,
                              const std::vector<KeyPointId>& ids,
                              std::string summary_id,
                              Domain domain = Domain::kOther) {
  Hierarchy h;
  h.summary_id = std::move(summary_id);
  h.domain = domain;
  for (const auto& c : f.clusters) {
    std::vector<KeyPointId> members;
    for (std::size_t x : c) members.push_back(ids.at(x));
    h.clusters.push_back(std::move(members));
  }
  for (std::size_t c = 0; c < f.size(); ++c)
    if (f.parent[c]) h.edges.push_back({c, *f.parent[c]});
  return h;
}

// Structural problems of a hierarchy, independent of any key point set.
enum class ViolationKind {
  kEmptyCluster,
  kDuplicateKeyPoint,
  kUnknownKeyPoint,
  kFilteredKeyPoint,
  kBadEdge,
  kMultiParent,
  kCycle,
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kEmptyCluster: return "empty-cluster";
    case ViolationKind::kDuplicateKeyPoint: return "duplicate-key-point";
    case ViolationKind::kUnknownKeyPoint: return "unknown-key-point";
    case ViolationKind::kFilteredKeyPoint: return "filtered-key-point";
    case ViolationKind::kBadEdge: return "bad-edge";
    case ViolationKind::kMultiParent: return "multi-parent";
    case ViolationKind::kCycle: return "cycle";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind k) const {
    return std::any_of(violations.begin(), violations.end(),
                       [k](const Violation& v) { return v.kind == k; });
  }
};

namespace detail {

inline void check_structure(const Hierarchy& h, ValidationReport& report) {
  const std::size_t m = h.cluster_count();
  std::unordered_set<KeyPointId> seen;
  for (std::size_t c = 0; c < m; ++c) {
    if (h.clusters[c].empty())
      report.violations.push_back(
          {ViolationKind::kEmptyCluster,
           "cluster " + std::to_string(c) + " is empty"});
    for (const KeyPointId& id : h.clusters[c])
      if (!seen.insert(id).second)
        report.violations.push_back(
            {ViolationKind::kDuplicateKeyPoint,
             "key point '" + id + "' appears in more than one cluster"});
  }
  std::vector<std::optional<std::size_t>> parent(m);
  for (const ClusterEdge& e : h.edges) {
    if (e.child >= m || e.parent >= m || e.child == e.parent) {
      report.violations.push_back(
          {ViolationKind::kBadEdge, "edge [" + std::to_string(e.child) +
                                        ", " + std::to_string(e.parent) +
                                        "] is not between two clusters"});
      continue;
    }
    if (parent[e.child] && *parent[e.child] == e.parent) {
      report.violations.push_back(
          {ViolationKind::kBadEdge, "edge [" + std::to_string(e.child) +
                                        ", " + std::to_string(e.parent) +
                                        "] is listed twice"});
      continue;
    }
    if (parent[e.child]) {
      report.violations.push_back(
          {ViolationKind::kMultiParent,
           "cluster " + std::to_string(e.child) + " has parents " +
               std::to_string(*parent[e.child]) + " and " +
               std::to_string(e.parent)});
      continue;
    }
    parent[e.child] = e.parent;
  }
  // Walk each parent chain; a chain longer than m revisits a cluster.
  std::vector<int> state(m, 0);  // 0 unseen, 1 on current path, 2 done
  for (std::size_t start = 0; start < m; ++start) {
    std::vector<std::size_t> path;
    std::optional<std::size_t> c = start;
    while (c && state[*c] == 0) {
      state[*c] = 1;
      path.push_back(*c);
      c = parent[*c];
    }
    if (c && state[*c] == 1) {
      report.violations.push_back(
          {ViolationKind::kCycle,
           "parent edges form a cycle through cluster " + std::to_string(*c)});
    }
    for (std::size_t p : path) state[p] = 2;
  }
}

}  // namespace detail

// Structural validation only (no key point universe).
inline ValidationReport validate_structure(const Hierarchy& h) {
  ValidationReport report;
  detail::check_structure(h, report);
  return report;
}

// Full validation: structure plus membership against the summary's key
// points. Filtered key points must not appear.
inline ValidationReport validate_hierarchy(const Hierarchy& h,
                                           const KeyPointSet& kps) {
  ValidationReport report;
  detail::check_structure(h, report);
  for (const auto& cluster : h.clusters) {
    for (const KeyPointId& id : cluster) {
      const KeyPoint* kp = kps.find(id);
      if (kp == nullptr)
        report.violations.push_back(
            {ViolationKind::kUnknownKeyPoint,
             "key point '" + id + "' is not in summary '" +
                 kps.summary_id() + "'"});
      else if (kp->filtered)
        report.violations.push_back(
            {ViolationKind::kFilteredKeyPoint,
             "key point '" + id + "' is filtered"});
    }
  }
  return report;
}

namespace detail {

inline void require_structure(const Hierarchy& h) {
  ValidationReport r = validate_structure(h);
  if (!r.ok())
    throw StructuralError("invalid hierarchy '" + h.summary_id +
                          "': " + std::string(to_string(
                                      r.violations.front().kind)) +
                          ": " + r.violations.front().message);
}

}  // namespace detail

// Parent of each cluster. Throws StructuralError on an invalid hierarchy.
inline std::vector<std::optional<std::size_t>> parents(const Hierarchy& h) {
  detail::require_structure(h);
  std::vector<std::optional<std::size_t>> parent(h.cluster_count());
  for (const ClusterEdge& e : h.edges) parent[e.child] = e.parent;
  return parent;
}

// Clusters on the parent path from c (exclusive) up to its root.
inline std::vector<std::size_t> ancestors(const Hierarchy& h, std::size_t c) {
  if (c >= h.cluster_count())
    throw std::out_of_range("cluster index " + std::to_string(c) +
                            " out of range");
  const auto parent = parents(h);
  std::vector<std::size_t> out;
  for (auto p = parent[c]; p; p = parent[*p]) out.push_back(*p);
  return out;
}

// Index-space view of a hierarchy. Ids are numbered in order of
// first appearance; `ids` receives that numbering.
inline ClusterForest to_forest(const Hierarchy& h,
                               std::vector<KeyPointId>* ids = nullptr) {
  auto parent = parents(h);
  ClusterForest f;
  std::vector<KeyPointId> local;
  for (const auto& cluster : h.clusters) {
    std::vector<std::size_t> members;
    for (const KeyPointId& id : cluster) {
      members.push_back(local.size());
      local.push_back(id);
    }
    f.clusters.push_back(std::move(members));
  }
  f.parent = std::move(parent);
  if (ids) *ids = std::move(local);
  return f;
}

// The relation set R(H): (x, y) for distinct x, y that share a cluster or
// whose clusters are joined by a directed path x ~> y.
inline RelationSet derive_relations(const Hierarchy& h) {
  std::vector<KeyPointId> ids;
  ClusterForest f = to_forest(h, &ids);
  RelationSet r;
  for_each_relation(f, [&](std::size_t x, std::size_t y) {
    r.insert(ids[x], ids[y]);
  });
  return r;
}

// Canonical id-space form: members sorted, clusters ordered by their
// smallest member, edges sorted. Two hierarchies describe the same KPH iff
// their canonical forms have equal clusters and edges.
inline Hierarchy canonical(const Hierarchy& h) {
  auto parent = parents(h);
  std::vector<std::size_t> order(h.cluster_count());
  std::iota(order.begin(), order.end(), 0);
  Hierarchy out;
  out.summary_id = h.summary_id;
  out.domain = h.domain;
  std::vector<std::vector<KeyPointId>> sorted = h.clusters;
  for (auto& c : sorted) std::sort(c.begin(), c.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sorted[a] < sorted[b];
  });
  std::vector<std::size_t> remap(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    remap[order[k]] = k;
    out.clusters.push_back(sorted[order[k]]);
  }
  for (std::size_t c = 0; c < parent.size(); ++c)
    if (parent[c]) out.edges.push_back({remap[c], remap[*parent[c]]});
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

inline bool same_structure(const Hierarchy& a, const Hierarchy& b) {
  Hierarchy ca = canonical(a), cb = canonical(b);
  return ca.clusters == cb.clusters && ca.edges == cb.edges;
}

// Indented text rendering, roots first, children below their parent.
// Optional `text` maps ids to display strings.
inline std::string dump_indented(
    const Hierarchy& h,
    const std::function<std::string(const KeyPointId&)>& text = {}) {
  auto parent = parents(h);
  std::vector<std::vector<std::size_t>> children(h.cluster_count());
  std::vector<std::size_t> roots;
  for (std::size_t c = 0; c < parent.size(); ++c)
    (parent[c] ? children[*parent[c]] : roots).push_back(c);
  std::ostringstream out;
  std::function<void(std::size_t, int)> emit = [&](std::size_t c, int depth) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << "- ";
    for (std::size_t i = 0; i < h.clusters[c].size(); ++i) {
      const KeyPointId& id = h.clusters[c][i];
      if (i) out << " | ";
      out << (text ? text(id) : id);
    }
    out << '\n';
    for (std::size_t ch : children[c]) emit(ch, depth + 1);
  };
  for (std::size_t r : roots) emit(r, 0);
  return out.str();
}

}  // namespace kph

#endif  // KPH_HIERARCHY_HPP_
