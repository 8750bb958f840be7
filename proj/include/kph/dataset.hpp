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

#ifndef KPH_DATASET_HPP_
#define KPH_DATASET_HPP_

// Summary-set directory layout:
//
//   <root>/<summary>/summary.json      {"summary_id": ..., "domain": ...}
//   <root>/<summary>/key_points.jsonl  key point records
//   <root>/<summary>/matches.csv       sentence x key point likelihoods
//   <root>/<summary>/scores.tsv        pairwise scores
//   <root>/<summary>/gold.jsonl        gold hierarchy (one document)
//
// Every file is optional; each command checks for the ones it needs.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kph/errors.hpp"
#include "kph/hierarchy.hpp"
#include "kph/io.hpp"
#include "kph/types.hpp"

namespace kph {

inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kKeyPointsFile = "key_points.jsonl";
inline constexpr const char* kMatchesFile = "matches.csv";
inline constexpr const char* kScoresFile = "scores.tsv";
inline constexpr const char* kGoldFile = "gold.jsonl";

struct SummaryEntry {
  std::string summary_id;
  Domain domain = Domain::kOther;
  std::filesystem::path dir;
  std::optional<KeyPointSet> key_points;
  std::optional<Hierarchy> gold;

  std::filesystem::path file(const char* name) const { return dir / name; }
  bool has(const char* name) const {
    return std::filesystem::is_regular_file(dir / name);
  }
};

namespace detail {

inline bool looks_like_summary(const std::filesystem::path& dir) {
  for (const char* f : {kSummaryFile, kKeyPointsFile, kMatchesFile, kScoresFile,
                        kGoldFile})
    if (std::filesystem::is_regular_file(dir / f)) return true;
  return false;
}

}  // namespace detail

// Loads every summary directory under `root`, sorted by directory name.
// Key points and gold hierarchies are parsed when present.
inline std::vector<SummaryEntry> load_summary_set(
    const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root))
    throw DataError("'" + root.string() + "' is not a directory");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && detail::looks_like_summary(e.path()))
      dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());

  std::vector<SummaryEntry> out;
  std::map<std::string, std::string> seen;
  for (const fs::path& dir : dirs) {
    SummaryEntry s;
    s.dir = dir;
    s.summary_id = dir.filename().string();
    bool domain_known = false;
    if (fs::is_regular_file(dir / kSummaryFile)) {
      const std::string path = (dir / kSummaryFile).string();
      std::ifstream in(path);
      io::json doc;
      try {
        doc = io::json::parse(in);
      } catch (const io::json::exception& e) {
        throw ParseError(path, 0, "", std::string("invalid JSON: ") + e.what());
      }
      if (doc.contains("summary_id"))
        s.summary_id = io::detail::get_field<std::string>(doc, "summary_id",
                                                          path, 1);
      if (doc.contains("domain")) {
        auto d = parse_domain(
            io::detail::get_field<std::string>(doc, "domain", path, 1));
        if (!d) throw ParseError(path, 1, "domain", "unknown domain");
        s.domain = *d;
        domain_known = true;
      }
    }
    if (s.has(kGoldFile)) {
      auto hs = io::load_hierarchies(s.file(kGoldFile).string());
      if (hs.size() != 1)
        throw ParseError(s.file(kGoldFile).string(), 0, "",
                         "expected exactly one hierarchy document");
      s.gold = std::move(hs.front());
      if (s.gold->summary_id != s.summary_id)
        throw ParseError(s.file(kGoldFile).string(), 1, "summary_id",
                         "'" + s.gold->summary_id + "' does not match '" +
                             s.summary_id + "'");
      if (!domain_known) s.domain = s.gold->domain;
      s.gold->domain = s.domain;
    }
    if (s.has(kKeyPointsFile))
      s.key_points = io::load_key_points(s.file(kKeyPointsFile).string(),
                                         s.summary_id, s.domain);
    if (!seen.emplace(s.summary_id, dir.string()).second)
      throw DataError("summary '" + s.summary_id + "' appears in both '" +
                      seen[s.summary_id] + "' and '" + dir.string() + "'");
    out.push_back(std::move(s));
  }
  return out;
}

struct DatasetCounts {
  std::size_t hierarchies = 0;
  std::size_t key_points = 0;
  std::size_t filtered = 0;
  std::size_t relations = 0;
};

struct DatasetStatistics {
  std::map<Domain, DatasetCounts> by_domain;
  DatasetCounts total;
};

// Counts over summaries that carry both key points and a gold hierarchy.
inline DatasetStatistics dataset_statistics(
    const std::vector<SummaryEntry>& summaries) {
  DatasetStatistics st;
  for (const SummaryEntry& s : summaries) {
    if (!s.gold || !s.key_points) continue;
    DatasetCounts c;
    c.hierarchies = 1;
    c.key_points = s.key_points->size();
    c.filtered = s.key_points->filtered_count();
    c.relations = derive_relations(*s.gold).size();
    for (DatasetCounts* t : {&st.by_domain[s.domain], &st.total}) {
      t->hierarchies += c.hierarchies;
      t->key_points += c.key_points;
      t->filtered += c.filtered;
      t->relations += c.relations;
    }
  }
  return st;
}

}  // namespace kph

#endif  // KPH_DATASET_HPP_
