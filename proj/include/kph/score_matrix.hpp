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

#ifndef KPH_SCORE_MATRIX_HPP_
#define KPH_SCORE_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kph/errors.hpp"
#include "kph/types.hpp"

namespace kph {

// Free-form key/value record of how a score matrix was produced (scorer
// name, match threshold, input digests). Ordered for stable serialization.
using Provenance = std::map<std::string, std::string>;

// Pairwise directional scores s(i, j) in [0, 1] over every ordered pair of
// distinct key points of one summary. Dense, row-major; the diagonal is
// unused and held at zero.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;

  ScoreMatrix(std::string summary_id, std::vector<KeyPointId> ids,
              std::vector<double> values, Provenance provenance = {})
      : summary_id_(std::move(summary_id)),
        ids_(std::move(ids)),
        values_(std::move(values)),
        provenance_(std::move(provenance)) {
    const std::size_t n = ids_.size();
    if (values_.size() != n * n)
      throw DataError("score matrix for '" + summary_id_ + "' expects " +
                      std::to_string(n * n) + " values, got " +
                      std::to_string(values_.size()));
    for (std::size_t i = 0; i < n; ++i) {
      if (!index_.emplace(ids_[i], i).second)
        throw DataError("duplicate key point id '" + ids_[i] +
                        "' in score matrix");
      for (std::size_t j = 0; j < n; ++j) {
        double& v = values_[i * n + j];
        if (i == j) {
          v = 0.0;
          continue;
        }
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
          throw DataError("score s(" + ids_[i] + ", " + ids_[j] +
                          ") = " + std::to_string(v) + " is outside [0, 1]");
      }
    }
  }

  // Builds a matrix by evaluating `score(i, j)` for every ordered pair.
  template <typename Fn>
  static ScoreMatrix from_function(std::string summary_id,
                                  std::vector<KeyPointId> ids, Fn&& score,
                                  Provenance provenance = {}) {
    const std::size_t n = ids.size();
    std::vector<double> values(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) values[i * n + j] = score(i, j);
    return ScoreMatrix(std::move(summary_id), std::move(ids),
                       std::move(values), std::move(provenance));
  }

  const std::string& summary_id() const { return summary_id_; }
  const std::vector<KeyPointId>& ids() const { return ids_; }
  const KeyPointId& id(std::size_t i) const { return ids_[i]; }
  std::size_t size() const { return ids_.size(); }
  const Provenance& provenance() const { return provenance_; }
  Provenance& provenance() { return provenance_; }

  std::optional<std::size_t> index_of(const KeyPointId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * ids_.size() + j];
  }

  // Throws DataError when either id is unknown or i == j.
  double at(const KeyPointId& src, const KeyPointId& dst) const {
    auto i = index_of(src);
    auto j = index_of(dst);
    if (!i || !j || *i == *j)
      throw DataError("no score for pair (" + src + ", " + dst +
                      ") in summary '" + summary_id_ + "'");
    return (*this)(*i, *j);
  }

  // Sub-matrix over `keep`, in the order given. Every id must be present.
  ScoreMatrix restrict_to(const std::vector<KeyPointId>& keep) const {
    std::vector<std::size_t> src;
    src.reserve(keep.size());
    for (const KeyPointId& id : keep) {
      auto i = index_of(id);
      if (!i)
        throw DataError("score matrix for '" + summary_id_ +
                        "' has no scores for key point '" + id + "'");
      src.push_back(*i);
    }
    return from_function(
        summary_id_, keep,
        [&](std::size_t i, std::size_t j) { return (*this)(src[i], src[j]); },
        provenance_);
  }

  bool same_universe(const ScoreMatrix& other) const {
    if (other.size() != size()) return false;
    for (const KeyPointId& id : ids_)
      if (!other.index_of(id)) return false;
    return true;
  }

 private:
  std::string summary_id_;
  std::vector<KeyPointId> ids_;
  std::vector<double> values_;
  Provenance provenance_;
  std::unordered_map<KeyPointId, std::size_t> index_;
};

}  // namespace kph

#endif  // KPH_SCORE_MATRIX_HPP_
