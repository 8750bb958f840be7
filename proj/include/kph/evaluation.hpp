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

#ifndef KPH_EVALUATION_HPP_
#define KPH_EVALUATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "kph/construction.hpp"
#include "kph/errors.hpp"
#include "kph/hierarchy.hpp"
#include "kph/score_matrix.hpp"
#include "kph/types.hpp"

namespace kph {

// Precision, recall and F1 over relation sets, with the counts behind them.
struct RelationScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t correct = 0;
};

// Both sets empty counts as a perfect match; otherwise an empty side
// yields zero precision and recall.
inline RelationScores relation_scores_from_counts(std::size_t correct,
                                                  std::size_t predicted,
                                                  std::size_t gold) {
  RelationScores r{0.0, 0.0, 0.0, predicted, gold, correct};
  if (predicted == 0 && gold == 0) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  if (predicted > 0)
    r.precision = static_cast<double>(correct) / static_cast<double>(predicted);
  if (gold > 0)
    r.recall = static_cast<double>(correct) / static_cast<double>(gold);
  if (r.precision + r.recall > 0.0)
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

// Relation sets keyed by summary id.
using RelationsBySummary = std::map<std::string, RelationSet>;

// Micro-level scores over the union of per-summary relations. Both maps must
// cover the same summaries.
inline RelationScores relation_f1(const RelationsBySummary& predicted,
                                  const RelationsBySummary& gold) {
  std::size_t n_pred = 0, n_gold = 0, correct = 0;
  for (const auto& [id, g] : gold) {
    auto it = predicted.find(id);
    if (it == predicted.end())
      throw DataError("no prediction for summary '" + id + "'");
    n_gold += g.size();
    n_pred += it->second.size();
    for (const auto& [x, y] : it->second)
      if (g.contains(x, y)) ++correct;
  }
  for (const auto& [id, p] : predicted)
    if (!gold.count(id))
      throw DataError("prediction for summary '" + id + "' has no gold");
  return relation_scores_from_counts(correct, n_pred, n_gold);
}

namespace detail {

inline RelationsBySummary relations_by_summary(
    const std::vector<Hierarchy>& hs) {
  RelationsBySummary out;
  for (const Hierarchy& h : hs)
    if (!out.emplace(h.summary_id, derive_relations(h)).second)
      throw DataError("summary '" + h.summary_id + "' listed twice");
  return out;
}

}  // namespace detail

// F1 of predicted against gold hierarchies over the union of their induced
// relations. When key point sets are given, every predicted key point must
// be an unfiltered key point of its summary.
inline RelationScores relation_f1(
    const std::vector<Hierarchy>& predicted, const std::vector<Hierarchy>& gold,
    const std::vector<KeyPointSet>* key_points = nullptr) {
  if (key_points) {
    std::map<std::string, const KeyPointSet*> by_id;
    for (const KeyPointSet& k : *key_points) by_id[k.summary_id()] = &k;
    for (const Hierarchy& h : predicted) {
      auto it = by_id.find(h.summary_id);
      if (it == by_id.end())
        throw DataError("unknown summary '" + h.summary_id + "'");
      for (const auto& cluster : h.clusters)
        for (const KeyPointId& id : cluster) {
          const KeyPoint* kp = it->second->find(id);
          if (kp == nullptr || kp->filtered)
            throw DataError("predicted hierarchy '" + h.summary_id +
                            "' uses unknown key point '" + id + "'");
        }
    }
  }
  return relation_f1(detail::relations_by_summary(predicted),
                     detail::relations_by_summary(gold));
}

// ---------------------------------------------------------------------------
// Reports

struct PRPoint {
  double threshold = 0.0;
  double recall = 0.0;
  double precision = 0.0;
};

// Precision/recall at each distinct score threshold, from the highest
// threshold down. Recall is non-decreasing along the list.
struct PRCurve {
  std::vector<PRPoint> points;
  std::size_t positives = 0;
  std::size_t pairs = 0;
};

struct DomainMetrics {
  RelationScores relations;
  std::optional<double> auc;
};

struct EvalReport {
  std::map<Domain, DomainMetrics> domains;
  double macro_f1 = 0.0;
  std::optional<double> macro_auc;
  // Per-summary thresholds chosen by leave-one-out tuning.
  std::map<std::string, double> chosen_tau;
  std::map<Domain, PRCurve> curves;
  Provenance provenance;
};

// Per-domain F1 over the union of relations of each domain's summaries,
// plus the arithmetic mean over domains.
inline EvalReport evaluate_relations(const RelationsBySummary& predicted,
                                     const RelationsBySummary& gold,
                                     const std::map<std::string, Domain>& domain_of) {
  std::map<Domain, std::pair<RelationsBySummary, RelationsBySummary>> split;
  for (const auto& [id, g] : gold) {
    auto d = domain_of.find(id);
    if (d == domain_of.end())
      throw DataError("no domain recorded for summary '" + id + "'");
    auto p = predicted.find(id);
    if (p == predicted.end())
      throw DataError("no prediction for summary '" + id + "'");
    split[d->second].first.emplace(id, p->second);
    split[d->second].second.emplace(id, g);
  }
  for (const auto& [id, p] : predicted)
    if (!gold.count(id))
      throw DataError("prediction for summary '" + id + "' has no gold");
  EvalReport report;
  double sum = 0.0;
  for (const auto& [domain, sets] : split) {
    report.domains[domain].relations = relation_f1(sets.first, sets.second);
    sum += report.domains[domain].relations.f1;
  }
  if (!split.empty()) report.macro_f1 = sum / static_cast<double>(split.size());
  return report;
}

inline EvalReport evaluate_hierarchies(const std::vector<Hierarchy>& predicted,
                                       const std::vector<Hierarchy>& gold) {
  std::map<std::string, Domain> domain_of;
  for (const Hierarchy& g : gold) domain_of[g.summary_id] = g.domain;
  return evaluate_relations(detail::relations_by_summary(predicted),
                            detail::relations_by_summary(gold), domain_of);
}

// ---------------------------------------------------------------------------
// Ranking metrics

// PR curve over every ordered key point pair of the given score matrices.
// A pair is positive iff it is a relation of the matching gold hierarchy.
// Every key point of a gold hierarchy must have scores.
inline PRCurve pr_curve(const std::vector<const ScoreMatrix*>& scores,
                        const std::vector<const Hierarchy*>& gold) {
  std::map<std::string, const Hierarchy*> gold_by_id;
  for (const Hierarchy* g : gold) gold_by_id[g->summary_id] = g;
  struct Scored {
    double score;
    std::size_t summary, i, j;
    bool positive;
  };
  std::vector<Scored> pairs;
  PRCurve curve;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const ScoreMatrix& s = *scores[k];
    auto it = gold_by_id.find(s.summary_id());
    if (it == gold_by_id.end())
      throw DataError("no gold hierarchy for summary '" + s.summary_id() + "'");
    const RelationSet rel = derive_relations(*it->second);
    for (const auto& cluster : it->second->clusters)
      for (const KeyPointId& id : cluster)
        if (!s.index_of(id))
          throw DataError("scores for summary '" + s.summary_id() +
                          "' are missing pairs of key point '" + id + "'");
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (i == j) continue;
        const bool pos = rel.contains(s.id(i), s.id(j));
        pairs.push_back({s(i, j), k, i, j, pos});
        curve.positives += pos ? 1 : 0;
      }
  }
  if (scores.size() != gold_by_id.size())
    throw DataError("score matrices and gold hierarchies cover different "
                    "summaries");
  curve.pairs = pairs.size();
  if (curve.positives == 0)
    throw DataError("gold hierarchies induce no relations; recall undefined");
  std::sort(pairs.begin(), pairs.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.summary, a.i, a.j) < std::tie(b.summary, b.i, b.j);
  });
  std::size_t tp = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    tp += pairs[k].positive ? 1 : 0;
    if (k + 1 < pairs.size() && pairs[k + 1].score == pairs[k].score) continue;
    curve.points.push_back(
        {pairs[k].score,
         static_cast<double>(tp) / static_cast<double>(curve.positives),
         static_cast<double>(tp) / static_cast<double>(k + 1)});
  }
  return curve;
}

inline PRCurve pr_curve(const ScoreMatrix& scores, const Hierarchy& gold) {
  return pr_curve(std::vector<const ScoreMatrix*>{&scores},
                  std::vector<const Hierarchy*>{&gold});
}

// Trapezoidal area under the precision/recall polyline for recall in
// [min_recall, max recall], without normalizing by the recall span. The
// curve is extended to recall 0 at its first precision; the precision at
// min_recall is linearly interpolated.
inline double auc_at_min_recall(const PRCurve& curve, double min_recall = 0.1) {
  if (curve.points.empty()) throw std::invalid_argument("empty PR curve");
  std::vector<std::pair<double, double>> poly;
  poly.emplace_back(0.0, curve.points.front().precision);
  for (const PRPoint& p : curve.points) poly.emplace_back(p.recall, p.precision);
  double area = 0.0;
  for (std::size_t k = 1; k < poly.size(); ++k) {
    auto [r0, p0] = poly[k - 1];
    auto [r1, p1] = poly[k];
    if (r1 <= min_recall || r1 <= r0) continue;
    if (r0 < min_recall) {
      p0 = p0 + (p1 - p0) * (min_recall - r0) / (r1 - r0);
      r0 = min_recall;
    }
    area += (r1 - r0) * (p0 + p1) / 2.0;
  }
  return area;
}

// Pairs (i, j) with s(i, j) > tau, with no structural constraint.
inline RelationSet local_relations_baseline(const ScoreMatrix& s, double tau) {
  RelationSet r;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (i != j && s(i, j) > tau) r.insert(s.id(i), s.id(j));
  return r;
}

// Average ranks (1-based), ties sharing the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t k = 0; k < order.size();) {
    std::size_t end = k;
    while (end + 1 < order.size() && v[order[end + 1]] == v[order[k]]) ++end;
    const double r = (static_cast<double>(k + end) / 2.0) + 1.0;
    for (std::size_t t = k; t <= end; ++t) rank[order[t]] = r;
    k = end + 1;
  }
  return rank;
}

// Spearman rank correlation: Pearson correlation of average ranks.
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw DataError("spearman: samples differ in length");
  if (x.size() < 2) throw DataError("spearman: need at least 2 pairs");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DataError("spearman: constant scores have no rank correlation");
  return sxy / std::sqrt(sxx * syy);
}

// Appends both matrices' scores for every ordered pair, in a's pair order.
inline void append_paired_scores(const ScoreMatrix& a, const ScoreMatrix& b,
                                 std::vector<double>& xs,
                                 std::vector<double>& ys) {
  if (!a.same_universe(b))
    throw DataError("score matrices for '" + a.summary_id() +
                    "' cover different key points");
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i == j) continue;
      xs.push_back(a(i, j));
      ys.push_back(b.at(a.id(i), a.id(j)));
    }
}

inline double spearman_correlation(const ScoreMatrix& a, const ScoreMatrix& b) {
  std::vector<double> xs, ys;
  append_paired_scores(a, b, xs, ys);
  return spearman(xs, ys);
}

// ---------------------------------------------------------------------------
// Leave-one-out threshold tuning

using RelationPredictor =
    std::function<RelationSet(const ScoreMatrix& scores, double tau)>;

inline RelationPredictor hierarchy_predictor(ConstructionConfig config) {
  return [config](const ScoreMatrix& s, double tau) {
    ConstructionConfig c = config;
    c.tau = tau;
    return derive_relations(build_hierarchy(s, c));
  };
}

inline RelationPredictor local_predictor() {
  return [](const ScoreMatrix& s, double tau) {
    return local_relations_baseline(s, tau);
  };
}

// 0.00, 0.01, ..., 1.00.
inline std::vector<double> default_tau_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 100; ++k) grid.push_back(k / 100.0);
  return grid;
}

struct TuningInput {
  const ScoreMatrix* scores = nullptr;
  const Hierarchy* gold = nullptr;
  Domain domain = Domain::kOther;
};

struct TuningResult {
  std::map<std::string, double> tau;
  RelationsBySummary predictions;
  EvalReport report;
};

// For each summary, picks the grid threshold that maximizes relation F1 on
// the other summaries of its domain (ties to the smallest threshold), then
// predicts the summary with it. The summary's own gold is never consulted
// when choosing its threshold.
inline TuningResult loo_threshold_tuning(const std::vector<TuningInput>& input,
                                         const RelationPredictor& predict,
                                         const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("empty threshold grid");
  std::map<Domain, std::vector<std::size_t>> by_domain;
  std::map<std::string, Domain> domain_of;
  for (std::size_t k = 0; k < input.size(); ++k) {
    by_domain[input[k].domain].push_back(k);
    if (!domain_of.emplace(input[k].scores->summary_id(), input[k].domain)
             .second)
      throw DataError("summary '" + input[k].scores->summary_id() +
                      "' listed twice");
  }
  for (const auto& [domain, members] : by_domain)
    if (members.size() < 2)
      throw DataError("domain '" + std::string(to_string(domain)) +
                      "' has a single summary; leave-one-out needs two");

  // predictions[k][g]: relations of summary k at grid point g.
  std::vector<std::vector<std::optional<RelationSet>>> cache(
      input.size(), std::vector<std::optional<RelationSet>>(grid.size()));
  auto predicted = [&](std::size_t k, std::size_t g) -> const RelationSet& {
    if (!cache[k][g]) cache[k][g] = predict(*input[k].scores, grid[g]);
    return *cache[k][g];
  };
  std::vector<RelationSet> gold(input.size());
  for (std::size_t k = 0; k < input.size(); ++k)
    gold[k] = derive_relations(*input[k].gold);

  TuningResult result;
  RelationsBySummary gold_map;
  for (const auto& [domain, members] : by_domain) {
    for (std::size_t held : members) {
      std::optional<std::size_t> best;
      double best_f1 = -1.0;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        RelationsBySummary p, r;
        for (std::size_t k : members) {
          if (k == held) continue;
          const std::string& id = input[k].scores->summary_id();
          p.emplace(id, predicted(k, g));
          r.emplace(id, gold[k]);
        }
        const double f1 = relation_f1(p, r).f1;
        if (!best || f1 > best_f1 ||
            (f1 == best_f1 && grid[g] < grid[*best])) {
          best = g;
          best_f1 = f1;
        }
      }
      const std::string& id = input[held].scores->summary_id();
      result.tau[id] = grid[*best];
      result.predictions.emplace(id, predicted(held, *best));
      gold_map.emplace(id, gold[held]);
    }
  }
  result.report = evaluate_relations(result.predictions, gold_map, domain_of);
  result.report.chosen_tau = result.tau;
  return result;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

inline constexpr std::size_t kBruteForceLimit = 7;

struct OptimalForest {
  ClusterForest forest;
  double objective = 0.0;
};

// Enumerates every partition of the key points into clusters (restricted
// growth strings) and every forest over those clusters, returning the one
// with the largest objective. Ties keep the first in enumeration order:
// partitions lexicographically by restricted growth string, then parent
// vectors lexicographically with "root" ordered last.
inline OptimalForest brute_force_optimal_forest(const ScoreMatrix& s,
                                                double tau) {
  const std::size_t n = s.size();
  if (n > kBruteForceLimit)
    throw std::invalid_argument(
        "brute-force search is limited to " +
        std::to_string(kBruteForceLimit) + " key points, got " +
        std::to_string(n));
  OptimalForest best;
  best.forest = ClusterForest::singletons(n);
  best.objective = objective_value(best.forest, s, tau);
  bool have = false;
  if (n == 0) return best;

  // Next restricted growth string; false after the last one.
  auto next_partition = [n](std::vector<std::size_t>& rgs) {
    for (std::size_t k = n; k-- > 1;) {
      const std::size_t prefix_max = *std::max_element(
          rgs.begin(), rgs.begin() + static_cast<std::ptrdiff_t>(k));
      if (rgs[k] <= prefix_max) {
        ++rgs[k];
        std::fill(rgs.begin() + static_cast<std::ptrdiff_t>(k) + 1, rgs.end(),
                  std::size_t{0});
        return true;
      }
    }
    return false;
  };
  // choice[c] in [0, m) selects parent value choice < c ? choice : choice+1
  // from {0..m} \ {c}; value m means root.
  auto next_choice = [](std::vector<std::size_t>& choice, std::size_t m) {
    for (std::size_t k = choice.size(); k-- > 0;) {
      if (++choice[k] < m) return true;
      choice[k] = 0;
    }
    return false;
  };

  std::vector<std::size_t> rgs(n, 0), choice, parent;
  do {
    const std::size_t m = *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<double> link(m * m, 0.0), intra(m, 0.0);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        if (x == y) continue;
        const double w = s(x, y) - tau;
        if (rgs[x] == rgs[y])
          intra[rgs[x]] += w;
        else
          link[rgs[x] * m + rgs[y]] += w;
      }
    const double base = std::accumulate(intra.begin(), intra.end(), 0.0);

    choice.assign(m, 0);
    parent.assign(m, 0);
    do {
      for (std::size_t c = 0; c < m; ++c)
        parent[c] = choice[c] < c ? choice[c] : choice[c] + 1;
      double total = base;
      bool acyclic = true;
      for (std::size_t c = 0; c < m && acyclic; ++c) {
        std::size_t steps = 0;
        for (std::size_t p = parent[c]; p != m; p = parent[p]) {
          if (++steps > m) {
            acyclic = false;
            break;
          }
          total += link[c * m + p];
        }
      }
      if (acyclic && (!have || total > best.objective)) {
        have = true;
        best.objective = total;
        ClusterForest f;
        f.clusters.assign(m, {});
        for (std::size_t x = 0; x < n; ++x) f.clusters[rgs[x]].push_back(x);
        for (std::size_t c = 0; c < m; ++c)
          f.parent.push_back(parent[c] == m
                                 ? std::nullopt
                                 : std::optional<std::size_t>(parent[c]));
        best.forest = std::move(f);
      }
    } while (next_choice(choice, m));
  } while (next_partition(rgs));
  return best;
}

inline std::pair<Hierarchy, double> brute_force_optimal_kph(
    const ScoreMatrix& s, double tau, Domain domain = Domain::kOther) {
  OptimalForest o = brute_force_optimal_forest(s, tau);
  return {to_hierarchy(o.forest, s.ids(), s.summary_id(), domain), o.objective};
}

}  // namespace kph

#endif  // KPH_EVALUATION_HPP_
