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

#ifndef KPH_TYPES_HPP_
#define KPH_TYPES_HPP_

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kph/errors.hpp"

namespace kph {

using KeyPointId = std::string;

enum class Polarity { kPositive, kNegative };

enum class Domain { kRestaurants, kHotels, kPC, kOther };

inline std::string_view to_string(Polarity p) {
  return p == Polarity::kPositive ? "positive" : "negative";
}

inline std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::kRestaurants: return "Restaurants";
    case Domain::kHotels: return "Hotels";
    case Domain::kPC: return "PC";
    case Domain::kOther: break;
  }
  return "other";
}

inline std::optional<Polarity> parse_polarity(std::string_view s) {
  if (s == "positive" || s == "pos") return Polarity::kPositive;
  if (s == "negative" || s == "neg") return Polarity::kNegative;
  return std::nullopt;
}

inline std::optional<Domain> parse_domain(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "restaurants" || lower == "restaurant" || lower == "rest")
    return Domain::kRestaurants;
  if (lower == "hotels" || lower == "hotel") return Domain::kHotels;
  if (lower == "pc") return Domain::kPC;
  if (lower == "other") return Domain::kOther;
  return std::nullopt;
}

struct KeyPoint {
  KeyPointId id;
  std::string text;
  Polarity polarity = Polarity::kPositive;
  std::int64_t match_count = 0;
  // Removed by annotators as low quality; never part of a hierarchy.
  bool filtered = false;
};

// The key points of one KPA summary (one business/product and polarity).
class KeyPointSet {
 public:
  KeyPointSet() = default;

  // Throws DataError when an invariant is violated.
  KeyPointSet(std::string summary_id, Domain domain,
              std::vector<KeyPoint> key_points)
      : summary_id_(std::move(summary_id)),
        domain_(domain),
        key_points_(std::move(key_points)) {
    for (std::size_t i = 0; i < key_points_.size(); ++i) {
      const KeyPoint& kp = key_points_[i];
      if (kp.id.empty()) throw DataError("key point with empty id");
      if (kp.text.empty())
        throw DataError("key point '" + kp.id + "' has empty text");
      if (kp.match_count < 0)
        throw DataError("key point '" + kp.id + "' has negative match_count");
      if (kp.polarity != key_points_.front().polarity)
        throw DataError("key point '" + kp.id +
                        "' has a different polarity than its summary");
      if (!index_.emplace(kp.id, i).second)
        throw DataError("duplicate key point id '" + kp.id + "'");
    }
  }

  const std::string& summary_id() const { return summary_id_; }
  Domain domain() const { return domain_; }
  const std::vector<KeyPoint>& key_points() const { return key_points_; }
  std::size_t size() const { return key_points_.size(); }

  const KeyPoint* find(const KeyPointId& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &key_points_[it->second];
  }

  // Ids of key points that survived annotation, in file order.
  std::vector<KeyPointId> unfiltered_ids() const {
    std::vector<KeyPointId> ids;
    for (const KeyPoint& kp : key_points_)
      if (!kp.filtered) ids.push_back(kp.id);
    return ids;
  }

  std::size_t filtered_count() const {
    return static_cast<std::size_t>(
        std::count_if(key_points_.begin(), key_points_.end(),
                      [](const KeyPoint& kp) { return kp.filtered; }));
  }

  // Descending match_count, ties in file order.
  std::vector<const KeyPoint*> by_prevalence() const {
    std::vector<const KeyPoint*> out;
    for (const KeyPoint& kp : key_points_) out.push_back(&kp);
    std::stable_sort(out.begin(), out.end(),
                     [](const KeyPoint* a, const KeyPoint* b) {
                       return a->match_count > b->match_count;
                     });
    return out;
  }

 private:
  std::string summary_id_;
  Domain domain_ = Domain::kOther;
  std::vector<KeyPoint> key_points_;
  std::unordered_map<KeyPointId, std::size_t> index_;
};

// A directed edge child -> parent between cluster indices.
struct ClusterEdge {
  std::size_t child = 0;
  std::size_t parent = 0;

  friend bool operator==(const ClusterEdge&, const ClusterEdge&) = default;
  friend auto operator<=>(const ClusterEdge&, const ClusterEdge&) = default;
};

// A Key Point Hierarchy: a directed forest whose vertices are clusters of
// equivalent key points and whose edges point from the more specific
// cluster to the more general one.
//
// The edge list is kept as loaded so that malformed inputs (a child with
// two parents, cycles) can be represented and reported by validation.
struct Hierarchy {
  std::string summary_id;
  Domain domain = Domain::kOther;
  std::vector<std::vector<KeyPointId>> clusters;
  std::vector<ClusterEdge> edges;

  std::size_t cluster_count() const { return clusters.size(); }
};

// Ordered key point pairs (x, y) meaning "x elaborates/supports y".
// Irreflexive: (x, x) is never stored.
class RelationSet {
 public:
  using Pair = std::pair<KeyPointId, KeyPointId>;
  using const_iterator = std::set<Pair>::const_iterator;

  // Returns false for reflexive pairs and duplicates.
  bool insert(KeyPointId x, KeyPointId y) {
    if (x == y) return false;
    return pairs_.emplace(std::move(x), std::move(y)).second;
  }

  bool contains(const KeyPointId& x, const KeyPointId& y) const {
    return pairs_.count(Pair{x, y}) > 0;
  }

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const_iterator begin() const { return pairs_.begin(); }
  const_iterator end() const { return pairs_.end(); }

  bool includes(const RelationSet& other) const {
    return std::includes(pairs_.begin(), pairs_.end(), other.pairs_.begin(),
                         other.pairs_.end());
  }

  friend bool operator==(const RelationSet&, const RelationSet&) = default;

 private:
  std::set<Pair> pairs_;
};

}  // namespace kph

#endif  // KPH_TYPES_HPP_
