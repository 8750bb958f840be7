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

#ifndef KPH_IO_HPP_
#define KPH_IO_HPP_

// Readers and writers for the on-disk formats. See docs/formats.md for the
// byte-level description of each file.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kph/errors.hpp"
#include "kph/score_matrix.hpp"
#include "kph/scoring.hpp"
#include "kph/types.hpp"

namespace kph::io {

using json = nlohmann::json;

inline constexpr std::string_view kScoreMagic = "# kph-scores 1";

// Fixed six-decimal rendering used by every numeric output.
inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

// Rounds to six decimals for JSON documents.
inline double round6(double v) {
  double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "", "cannot open file");
  return in;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline bool blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view text, const std::string& file,
                           std::size_t record, const std::string& field) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
    text.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(v))
    throw ParseError(file, record, field,
                     "'" + std::string(text) + "' is not a number");
  return v;
}

template <typename T>
T get_field(const json& doc, const char* name, const std::string& file,
            std::size_t record) {
  auto it = doc.find(name);
  if (it == doc.end()) throw ParseError(file, record, name, "missing");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(file, record, name, std::string("wrong type: ") + e.what());
  }
}

inline json parse_json_line(const std::string& line, const std::string& file,
                            std::size_t record) {
  try {
    json doc = json::parse(line);
    if (!doc.is_object())
      throw ParseError(file, record, "", "record is not a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw ParseError(file, record, "", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Key points: JSON lines with id, text, polarity, match_count, filtered.

inline std::vector<KeyPoint> read_key_points(std::istream& in,
                                             const std::string& file) {
  std::vector<KeyPoint> out;
  std::string line;
  std::size_t record = 0;
  std::set<KeyPointId> seen;
  while (std::getline(in, line)) {
    ++record;
    detail::strip_cr(line);
    if (detail::blank(line)) continue;
    json doc = detail::parse_json_line(line, file, record);
    KeyPoint kp;
    kp.id = detail::get_field<std::string>(doc, "id", file, record);
    if (kp.id.empty()) throw ParseError(file, record, "id", "empty id");
    if (kp.id.find_first_of("\t\n\r") != std::string::npos)
      throw ParseError(file, record, "id", "id contains a tab or newline");
    kp.text = detail::get_field<std::string>(doc, "text", file, record);
    if (kp.text.empty()) throw ParseError(file, record, "text", "empty text");
    auto pol = parse_polarity(
        detail::get_field<std::string>(doc, "polarity", file, record));
    if (!pol)
      throw ParseError(file, record, "polarity",
                       "expected 'positive' or 'negative'");
    kp.polarity = *pol;
    kp.match_count =
        detail::get_field<std::int64_t>(doc, "match_count", file, record);
    if (kp.match_count < 0)
      throw ParseError(file, record, "match_count", "negative count");
    kp.filtered = doc.contains("filtered")
                      ? detail::get_field<bool>(doc, "filtered", file, record)
                      : false;
    if (!seen.insert(kp.id).second)
      throw ParseError(file, record, "id", "duplicate id '" + kp.id + "'");
    if (!out.empty() && kp.polarity != out.front().polarity)
      throw ParseError(file, record, "polarity",
                       "differs from the summary's polarity");
    out.push_back(std::move(kp));
  }
  return out;
}

inline KeyPointSet load_key_points(const std::string& path,
                                   std::string summary_id, Domain domain) {
  auto in = detail::open_input(path);
  return KeyPointSet(std::move(summary_id), domain, read_key_points(in, path));
}

inline void write_key_points(std::ostream& out, const KeyPointSet& kps) {
  for (const KeyPoint& kp : kps.key_points()) {
    json doc = {{"id", kp.id},
                {"text", kp.text},
                {"polarity", std::string(to_string(kp.polarity))},
                {"match_count", kp.match_count},
                {"filtered", kp.filtered}};
    out << doc.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Hierarchies: JSON lines, one document per summary.

inline json hierarchy_to_json(const Hierarchy& h) {
  json edges = json::array();
  for (const ClusterEdge& e : h.edges) edges.push_back({e.child, e.parent});
  return json{{"summary_id", h.summary_id},
              {"domain", std::string(to_string(h.domain))},
              {"clusters", h.clusters},
              {"edges", edges}};
}

inline Hierarchy hierarchy_from_json(const json& doc, const std::string& file,
                                     std::size_t record) {
  Hierarchy h;
  h.summary_id = detail::get_field<std::string>(doc, "summary_id", file, record);
  if (h.summary_id.empty())
    throw ParseError(file, record, "summary_id", "empty summary id");
  if (doc.contains("domain")) {
    auto d = parse_domain(
        detail::get_field<std::string>(doc, "domain", file, record));
    if (!d) throw ParseError(file, record, "domain", "unknown domain");
    h.domain = *d;
  }
  h.clusters = detail::get_field<std::vector<std::vector<std::string>>>(
      doc, "clusters", file, record);
  auto edges = doc.contains("edges")
                   ? detail::get_field<std::vector<std::vector<std::size_t>>>(
                         doc, "edges", file, record)
                   : std::vector<std::vector<std::size_t>>{};
  for (const auto& e : edges) {
    if (e.size() != 2)
      throw ParseError(file, record, "edges",
                       "each edge must be [child_cluster, parent_cluster]");
    h.edges.push_back({e[0], e[1]});
  }
  return h;
}

inline std::vector<Hierarchy> read_hierarchies(std::istream& in,
                                               const std::string& file) {
  std::vector<Hierarchy> out;
  std::string line;
  std::size_t record = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++record;
    detail::strip_cr(line);
    if (detail::blank(line)) continue;
    Hierarchy h =
        hierarchy_from_json(detail::parse_json_line(line, file, record), file,
                            record);
    if (!seen.insert(h.summary_id).second)
      throw ParseError(file, record, "summary_id",
                       "duplicate summary '" + h.summary_id + "'");
    out.push_back(std::move(h));
  }
  return out;
}

inline std::vector<Hierarchy> load_hierarchies(const std::string& path) {
  auto in = detail::open_input(path);
  return read_hierarchies(in, path);
}

inline void write_hierarchy(std::ostream& out, const Hierarchy& h) {
  out << hierarchy_to_json(h).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Match matrix: CSV with header "sentence_id,<kp id>,..." and one row per
// sentence.

inline MatchMatrix read_match_matrix(std::istream& in, const std::string& file) {
  std::string line;
  std::size_t record = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++record;
    detail::strip_cr(line);
    if (detail::blank(line)) continue;
    header = detail::split(line, ',');
  }
  if (header.size() < 2 || header.front() != "sentence_id")
    throw ParseError(file, record, "",
                     "header must be 'sentence_id,<key point id>,...'");
  std::vector<KeyPointId> kp_ids(header.begin() + 1, header.end());
  std::set<KeyPointId> unique(kp_ids.begin(), kp_ids.end());
  if (unique.size() != kp_ids.size())
    throw ParseError(file, record, "", "duplicate key point id in header");
  std::vector<std::string> sentences;
  std::vector<double> values;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++record;
    detail::strip_cr(line);
    if (detail::blank(line)) continue;
    auto cells = detail::split(line, ',');
    if (cells.size() != header.size())
      throw ParseError(file, record, "",
                       "expected " + std::to_string(header.size()) +
                           " columns, found " + std::to_string(cells.size()));
    if (cells[0].empty() || !seen.insert(cells[0]).second)
      throw ParseError(file, record, "sentence_id",
                       "empty or duplicate sentence id");
    sentences.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = detail::parse_double(cells[c], file, record, header[c]);
      if (v < 0.0 || v > 1.0)
        throw ParseError(file, record, header[c],
                         "likelihood " + cells[c] + " is outside [0, 1]");
      values.push_back(v);
    }
  }
  if (sentences.empty()) throw ParseError(file, 0, "", "no sentence rows");
  return MatchMatrix(std::move(sentences), std::move(kp_ids), std::move(values));
}

inline MatchMatrix load_match_matrix(const std::string& path) {
  auto in = detail::open_input(path);
  return read_match_matrix(in, path);
}

inline void write_match_matrix(std::ostream& out, const MatchMatrix& m) {
  out << "sentence_id";
  for (const auto& id : m.key_point_ids()) out << ',' << id;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << m.sentence_ids()[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out << ',' << fixed6(m(r, c));
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Score matrix: TSV records (src, dst, score) behind a comment header that
// carries the summary id and provenance.

inline void write_score_matrix(std::ostream& out, const ScoreMatrix& s) {
  out << kScoreMagic << '\n';
  out << "# summary_id=" << s.summary_id() << '\n';
  for (const auto& [k, v] : s.provenance()) out << "# " << k << '=' << v << '\n';
  out << "src_kp_id\tdst_kp_id\tscore\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (i != j)
        out << s.id(i) << '\t' << s.id(j) << '\t' << fixed6(s(i, j)) << '\n';
}

// Reads a score file. When `declared` is given, the matrix covers exactly
// those key points (in that order); pairs touching other ids in `ignore`
// are dropped and any other id is an error. Without `declared`, the
// universe is the ids in order of first appearance. Every ordered pair of
// the universe must appear exactly once.
inline ScoreMatrix read_score_matrix(
    std::istream& in, const std::string& file,
    const std::vector<KeyPointId>* declared = nullptr,
    const std::set<KeyPointId>* ignore = nullptr) {
  std::string line;
  std::size_t record = 0;
  Provenance prov;
  std::string summary_id;
  bool saw_header = false;
  struct Entry {
    KeyPointId src, dst;
    double score;
    std::size_t record;
  };
  std::vector<Entry> entries;
  std::vector<KeyPointId> order;
  std::map<KeyPointId, std::size_t> index;
  auto note = [&](const KeyPointId& id) {
    if (index.emplace(id, order.size()).second) order.push_back(id);
  };
  while (std::getline(in, line)) {
    ++record;
    detail::strip_cr(line);
    if (detail::blank(line)) continue;
    if (line.front() == '#') {
      if (saw_header)
        throw ParseError(file, record, "", "comment after the column header");
      if (line == kScoreMagic) continue;
      std::string body = line.substr(1);
      if (!body.empty() && body.front() == ' ') body.erase(0, 1);
      auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      std::string key = body.substr(0, eq), value = body.substr(eq + 1);
      if (key == "summary_id")
        summary_id = value;
      else
        prov[key] = value;
      continue;
    }
    auto cells = detail::split(line, '\t');
    if (!saw_header) {
      saw_header = true;
      if (cells == std::vector<std::string>{"src_kp_id", "dst_kp_id", "score"})
        continue;
      throw ParseError(file, record, "",
                       "expected header 'src_kp_id<TAB>dst_kp_id<TAB>score'");
    }
    if (cells.size() != 3)
      throw ParseError(file, record, "",
                       "expected 3 tab-separated fields, found " +
                           std::to_string(cells.size()));
    if (cells[0].empty()) throw ParseError(file, record, "src_kp_id", "empty");
    if (cells[1].empty()) throw ParseError(file, record, "dst_kp_id", "empty");
    if (cells[0] == cells[1])
      throw ParseError(file, record, "dst_kp_id", "self pair");
    double v = detail::parse_double(cells[2], file, record, "score");
    if (v < 0.0 || v > 1.0)
      throw ParseError(file, record, "score",
                       "score " + cells[2] + " for (" + cells[0] + ", " +
                           cells[1] + ") is outside [0, 1]");
    note(cells[0]);
    note(cells[1]);
    entries.push_back({cells[0], cells[1], v, record});
  }
  if (!saw_header) throw ParseError(file, 0, "", "missing column header");

  std::vector<KeyPointId> universe = declared ? *declared : order;
  std::map<KeyPointId, std::size_t> pos;
  for (std::size_t i = 0; i < universe.size(); ++i) pos[universe[i]] = i;
  const std::size_t n = universe.size();
  std::vector<double> values(n * n, 0.0);
  std::vector<std::size_t> seen_at(n * n, 0);
  for (const Entry& e : entries) {
    auto a = pos.find(e.src), b = pos.find(e.dst);
    if (a == pos.end() || b == pos.end()) {
      const KeyPointId& bad = a == pos.end() ? e.src : e.dst;
      if (ignore && ignore->count(bad)) continue;
      throw ParseError(file, e.record, a == pos.end() ? "src_kp_id" : "dst_kp_id",
                       "unknown key point '" + bad + "'");
    }
    const std::size_t cell = a->second * n + b->second;
    if (seen_at[cell])
      throw ParseError(file, e.record, "",
                       "duplicate pair (" + e.src + ", " + e.dst +
                           "), first at record " + std::to_string(seen_at[cell]));
    seen_at[cell] = e.record;
    values[cell] = e.score;
  }
  std::size_t missing = 0;
  std::string examples;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !seen_at[i * n + j]) {
        if (missing < 5)
          examples += (missing ? ", (" : "(") + universe[i] + ", " +
                      universe[j] + ")";
        ++missing;
      }
  if (missing)
    throw ParseError(file, 0, "",
                     std::to_string(missing) + " missing pair(s): " + examples +
                         (missing > 5 ? ", ..." : ""));
  return ScoreMatrix(std::move(summary_id), std::move(universe),
                     std::move(values), std::move(prov));
}

inline ScoreMatrix load_external_scores(
    const std::string& path, const std::vector<KeyPointId>* declared = nullptr,
    const std::set<KeyPointId>* ignore = nullptr) {
  auto in = detail::open_input(path);
  return read_score_matrix(in, path, declared, ignore);
}

// ---------------------------------------------------------------------------
// Weak labels: JSON lines (premise, hypothesis, label, score).

inline void write_weak_labels(std::ostream& out, const WeakLabelSet& set) {
  for (const WeakLabelRecord& r : set.records) {
    out << "{\"premise\":" << json(r.premise).dump()
        << ",\"hypothesis\":" << json(r.hypothesis).dump() << ",\"label\":\""
        << to_string(r.label) << "\",\"score\":" << fixed6(r.score)
        << ",\"summary_id\":" << json(r.summary_id).dump()
        << ",\"premise_id\":" << json(r.premise_id).dump()
        << ",\"hypothesis_id\":" << json(r.hypothesis_id).dump() << "}\n";
  }
}

}  // namespace kph::io

#endif  // KPH_IO_HPP_
