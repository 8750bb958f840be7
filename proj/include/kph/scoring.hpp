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

#ifndef KPH_SCORING_HPP_
#define KPH_SCORING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kph/errors.hpp"
#include "kph/score_matrix.hpp"
#include "kph/types.hpp"

namespace kph {

// Sentence x key point match likelihoods for one summary, row-major.
class MatchMatrix {
 public:
  MatchMatrix() = default;

  MatchMatrix(std::vector<std::string> sentence_ids,
              std::vector<KeyPointId> key_point_ids,
              std::vector<double> values)
      : sentence_ids_(std::move(sentence_ids)),
        key_point_ids_(std::move(key_point_ids)),
        values_(std::move(values)) {
    if (values_.size() != sentence_ids_.size() * key_point_ids_.size())
      throw DataError("match matrix has " + std::to_string(values_.size()) +
                      " values for " + std::to_string(sentence_ids_.size()) +
                      " sentences x " +
                      std::to_string(key_point_ids_.size()) + " key points");
    for (std::size_t r = 0; r < rows(); ++r)
      for (std::size_t c = 0; c < cols(); ++c) {
        double v = (*this)(r, c);
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
          throw DataError("match likelihood for sentence '" +
                          sentence_ids_[r] + "', key point '" +
                          key_point_ids_[c] + "' is outside [0, 1]");
      }
  }

  std::size_t rows() const { return sentence_ids_.size(); }
  std::size_t cols() const { return key_point_ids_.size(); }
  const std::vector<std::string>& sentence_ids() const { return sentence_ids_; }
  const std::vector<KeyPointId>& key_point_ids() const {
    return key_point_ids_;
  }
  double operator()(std::size_t row, std::size_t col) const {
    return values_[row * cols() + col];
  }

  std::vector<double> column(std::size_t col) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = (*this)(r, col);
    return out;
  }

 private:
  std::vector<std::string> sentence_ids_;
  std::vector<KeyPointId> key_point_ids_;
  std::vector<double> values_;
};

// Distributional representation of a key point: one weight per input
// sentence, plus the indices of sentences that count as matched.
struct FeatureVector {
  KeyPointId key_point;
  std::vector<double> weights;
  // Ascending sentence indices with weights[i] >= the match threshold.
  std::vector<std::size_t> support;

  static FeatureVector from_weights(KeyPointId id, std::vector<double> weights,
                                    double match_threshold) {
    FeatureVector f{std::move(id), std::move(weights), {}};
    for (std::size_t i = 0; i < f.weights.size(); ++i)
      if (f.weights[i] >= match_threshold) f.support.push_back(i);
    return f;
  }
};

inline constexpr double kDefaultMatchThreshold = 0.5;

inline std::vector<FeatureVector> build_feature_vectors(
    const MatchMatrix& m, double match_threshold = kDefaultMatchThreshold) {
  if (!(match_threshold >= 0.0 && match_threshold <= 1.0))
    throw std::invalid_argument("match threshold must be in [0, 1]");
  if (m.rows() == 0 || m.cols() == 0)
    throw DataError("match matrix is empty");
  std::vector<FeatureVector> out;
  out.reserve(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c)
    out.push_back(FeatureVector::from_weights(m.key_point_ids()[c],
                                              m.column(c), match_threshold));
  return out;
}

namespace detail {

inline void require_same_universe(const FeatureVector& a,
                                  const FeatureVector& b) {
  if (a.weights.size() != b.weights.size())
    throw DataError("feature vectors of '" + a.key_point + "' and '" +
                    b.key_point + "' are over different sentence sets (" +
                    std::to_string(a.weights.size()) + " vs " +
                    std::to_string(b.weights.size()) + ")");
}

inline std::vector<bool> membership(const FeatureVector& f) {
  std::vector<bool> in(f.weights.size(), false);
  for (std::size_t s : f.support) in[s] = true;
  return in;
}

// Support indices ordered by descending weight, ties by index.
inline std::vector<std::size_t> ranked_support(const FeatureVector& f) {
  std::vector<std::size_t> r = f.support;
  std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) {
    return f.weights[a] > f.weights[b];
  });
  return r;
}

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace detail

// Binary inclusion: |support(i) & support(j)| / |support(i)|.
inline double score_binary_inclusion(const FeatureVector& fi,
                                     const FeatureVector& fj) {
  detail::require_same_universe(fi, fj);
  if (fi.support.empty()) return 0.0;
  const auto in_j = detail::membership(fj);
  std::size_t shared = 0;
  for (std::size_t s : fi.support) shared += in_j[s] ? 1 : 0;
  return static_cast<double>(shared) / static_cast<double>(fi.support.size());
}

// WeedsPrec: share of i's support weight that falls on features j also has.
inline double score_weedsprec(const FeatureVector& fi,
                              const FeatureVector& fj) {
  detail::require_same_universe(fi, fj);
  const auto in_j = detail::membership(fj);
  double num = 0.0, den = 0.0;
  for (std::size_t s : fi.support) {
    den += fi.weights[s];
    if (in_j[s]) num += fi.weights[s];
  }
  return den > 0.0 ? detail::clamp_unit(num / den) : 0.0;
}

// ClarkeDE: like WeedsPrec but each shared feature contributes
// min(w_i, w_j).
inline double score_clarkede(const FeatureVector& fi, const FeatureVector& fj) {
  detail::require_same_universe(fi, fj);
  const auto in_j = detail::membership(fj);
  double num = 0.0, den = 0.0;
  for (std::size_t s : fi.support) {
    den += fi.weights[s];
    if (in_j[s]) num += std::min(fi.weights[s], fj.weights[s]);
  }
  return den > 0.0 ? detail::clamp_unit(num / den) : 0.0;
}

// APinc: average precision of i's ranked features against j's feature set,
// with each hit weighted by how highly j ranks it:
//   rel(f) = 1 - rank_j(f) / (|support(j)| + 1)
//   APinc  = sum_r P(r) * rel(f_r) / |support(i)|
// Ranks are 1-based over descending weight, ties by sentence index.
inline double score_apinc(const FeatureVector& fi, const FeatureVector& fj) {
  detail::require_same_universe(fi, fj);
  if (fi.support.empty()) return 0.0;
  const auto ranked_j = detail::ranked_support(fj);
  std::vector<std::size_t> rank_j(fj.weights.size(), 0);  // 0 = absent
  for (std::size_t r = 0; r < ranked_j.size(); ++r) rank_j[ranked_j[r]] = r + 1;
  const double denom_j = static_cast<double>(ranked_j.size()) + 1.0;

  const auto ranked_i = detail::ranked_support(fi);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < ranked_i.size(); ++r) {
    const std::size_t f = ranked_i[r];
    if (rank_j[f] == 0) continue;
    ++hits;
    const double precision =
        static_cast<double>(hits) / static_cast<double>(r + 1);
    const double rel = 1.0 - static_cast<double>(rank_j[f]) / denom_j;
    sum += precision * rel;
  }
  return detail::clamp_unit(sum / static_cast<double>(ranked_i.size()));
}

enum class Scorer { kBinInc, kAPinc, kWeedsPrec, kClarkeDE };

inline std::string_view to_string(Scorer s) {
  switch (s) {
    case Scorer::kBinInc: return "bininc";
    case Scorer::kAPinc: return "apinc";
    case Scorer::kWeedsPrec: return "weedsprec";
    case Scorer::kClarkeDE: return "clarkede";
  }
  return "unknown";
}

inline std::optional<Scorer> parse_scorer(std::string_view name) {
  for (Scorer s : {Scorer::kBinInc, Scorer::kAPinc, Scorer::kWeedsPrec,
                   Scorer::kClarkeDE})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

inline double score_pair(Scorer scorer, const FeatureVector& fi,
                         const FeatureVector& fj) {
  switch (scorer) {
    case Scorer::kBinInc: return score_binary_inclusion(fi, fj);
    case Scorer::kAPinc: return score_apinc(fi, fj);
    case Scorer::kWeedsPrec: return score_weedsprec(fi, fj);
    case Scorer::kClarkeDE: return score_clarkede(fi, fj);
  }
  throw std::invalid_argument("unknown scorer");
}

// All-pairs directional scores for one summary. Key point order follows the
// match matrix columns.
inline ScoreMatrix score_match_matrix(
    const MatchMatrix& m, Scorer scorer, std::string summary_id,
    double match_threshold = kDefaultMatchThreshold, Provenance extra = {}) {
  const auto features = build_feature_vectors(m, match_threshold);
  Provenance prov = std::move(extra);
  prov["scorer"] = std::string(to_string(scorer));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", match_threshold);
  prov["theta_m"] = buf;
  return ScoreMatrix::from_function(
      std::move(summary_id), m.key_point_ids(),
      [&](std::size_t i, std::size_t j) {
        return score_pair(scorer, features[i], features[j]);
      },
      std::move(prov));
}

// Elementwise mean of two score matrices over the same ordered pairs.
// Output key point order follows `a`.
inline ScoreMatrix combine_average(const ScoreMatrix& a, const ScoreMatrix& b) {
  if (!a.summary_id().empty() && !b.summary_id().empty() &&
      a.summary_id() != b.summary_id())
    throw DataError("cannot combine scores of summaries '" + a.summary_id() +
                    "' and '" + b.summary_id() + "'");
  if (!a.same_universe(b))
    throw DataError("cannot combine score matrices over different key points");
  std::vector<std::size_t> to_b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) to_b[i] = *b.index_of(a.id(i));
  Provenance prov;
  prov["combine"] = "average";
  for (const auto& [k, v] : a.provenance()) prov["a." + k] = v;
  for (const auto& [k, v] : b.provenance()) prov["b." + k] = v;
  return ScoreMatrix::from_function(
      a.summary_id().empty() ? b.summary_id() : a.summary_id(), a.ids(),
      [&](std::size_t i, std::size_t j) {
        return (a(i, j) + b(to_b[i], to_b[j])) / 2.0;
      },
      std::move(prov));
}

// ---------------------------------------------------------------------------
// Weak labels

enum class WeakLabel { kEntail, kNeutral };

inline std::string_view to_string(WeakLabel l) {
  return l == WeakLabel::kEntail ? "entail" : "neutral";
}

struct WeakLabelRecord {
  std::string summary_id;
  KeyPointId premise_id;
  KeyPointId hypothesis_id;
  std::string premise;
  std::string hypothesis;
  WeakLabel label = WeakLabel::kNeutral;
  double score = 0.0;
};

struct WeakLabelSet {
  std::vector<WeakLabelRecord> records;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t available_negatives = 0;
  // Set when no pair scored above the threshold; records is then empty.
  bool no_positives = false;
};

struct WeakLabelConfig {
  double threshold = 0.5;
  double negative_ratio = 5.0;
  std::uint64_t seed = 0;
};

struct ScoredSummary {
  const ScoreMatrix* scores = nullptr;
  const KeyPointSet* key_points = nullptr;
};

namespace detail {

// Uniform integer in [0, bound) by rejection; portable across standard
// libraries unlike std::uniform_int_distribution.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit =
      std::mt19937_64::max() - (std::mt19937_64::max() % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace detail

// Labels candidate pairs and downsamples the negatives: a pair scoring above
// the threshold is an entailment, and negatives are drawn uniformly without
// replacement down to ratio x positives (all of them if fewer exist).
// Records keep their input order. Deterministic given the seed.
inline WeakLabelSet sample_weak_labels(std::vector<WeakLabelRecord> candidates,
                                       const WeakLabelConfig& config) {
  if (!(config.threshold > 0.0 && config.threshold < 1.0))
    throw std::invalid_argument("weak-label threshold must be in (0, 1)");
  if (!(config.negative_ratio >= 1.0) || !std::isfinite(config.negative_ratio))
    throw std::invalid_argument("negative ratio must be >= 1");

  WeakLabelSet out;
  std::vector<std::size_t> negative_slots;
  for (std::size_t r = 0; r < candidates.size(); ++r) {
    if (candidates[r].score > config.threshold) {
      candidates[r].label = WeakLabel::kEntail;
      ++out.positives;
    } else {
      candidates[r].label = WeakLabel::kNeutral;
      negative_slots.push_back(r);
    }
  }
  out.available_negatives = negative_slots.size();
  if (out.positives == 0) {
    out.no_positives = true;
    return out;
  }

  const auto wanted = static_cast<std::size_t>(std::llround(
      config.negative_ratio * static_cast<double>(out.positives)));
  const std::size_t take = std::min(wanted, negative_slots.size());
  // Partial Fisher-Yates over the negative slots.
  std::mt19937_64 rng(config.seed);
  for (std::size_t k = 0; k < take; ++k) {
    std::size_t pick =
        k + static_cast<std::size_t>(
                detail::uniform_below(rng, negative_slots.size() - k));
    std::swap(negative_slots[k], negative_slots[pick]);
  }
  std::vector<bool> keep(candidates.size(), false);
  for (std::size_t k = 0; k < take; ++k) keep[negative_slots[k]] = true;
  for (std::size_t r = 0; r < candidates.size(); ++r)
    if (candidates[r].label == WeakLabel::kEntail || keep[r])
      out.records.push_back(std::move(candidates[r]));
  out.negatives = take;
  return out;
}

// Weak labels over every ordered within-summary pair of the given
// summaries, pooled before sampling.
inline WeakLabelSet export_weak_labels(const std::vector<ScoredSummary>& input,
                                       const WeakLabelConfig& config) {
  std::vector<WeakLabelRecord> candidates;
  for (const ScoredSummary& item : input) {
    const ScoreMatrix& s = *item.scores;
    std::vector<const KeyPoint*> kp(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      kp[i] = item.key_points->find(s.id(i));
      if (kp[i] == nullptr)
        throw DataError("key point '" + s.id(i) + "' of summary '" +
                        s.summary_id() + "' has no text");
    }
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        if (i != j)
          candidates.push_back({s.summary_id(), kp[i]->id, kp[j]->id,
                                kp[i]->text, kp[j]->text, WeakLabel::kNeutral,
                                s(i, j)});
  }
  return sample_weak_labels(std::move(candidates), config);
}

inline WeakLabelSet export_weak_labels(const ScoreMatrix& scores,
                                       const KeyPointSet& kps,
                                       const WeakLabelConfig& config) {
  return export_weak_labels({ScoredSummary{&scores, &kps}}, config);
}

}  // namespace kph

#endif  // KPH_SCORING_HPP_
