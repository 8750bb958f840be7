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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kph/dataset.hpp"
#include "kph/io.hpp"

namespace kph::io {
namespace {

// Runs `fn` and returns the ParseError it throws.
template <typename Fn>
ParseError parse_error(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError thrown";
  return ParseError("", 0, "", "none");
}

const char* kScores =
    "# kph-scores 1\n"
    "# summary_id=s1\n"
    "# scorer=apinc\n"
    "src_kp_id\tdst_kp_id\tscore\n"
    "a\tb\t0.250000\n"
    "b\ta\t1.000000\n";

TEST(Fixed6, Rendering) {
  EXPECT_EQ(fixed6(0.5), "0.500000");
  EXPECT_EQ(fixed6(1.0 / 3.0), "0.333333");
  EXPECT_EQ(fixed6(-0.0), "0.000000");
  EXPECT_DOUBLE_EQ(round6(0.1234567), 0.123457);
}

TEST(ScoreFile, RoundTrip) {
  std::istringstream in(kScores);
  ScoreMatrix s = read_score_matrix(in, "scores.tsv");
  EXPECT_EQ(s.summary_id(), "s1");
  EXPECT_EQ(s.ids(), (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(s(0, 1), 0.25);
  EXPECT_EQ(s.provenance().at("scorer"), "apinc");
  std::ostringstream out;
  write_score_matrix(out, s);
  EXPECT_EQ(out.str(), kScores);
}

TEST(ScoreFile, OutOfRangeScoreNamesRecordAndField) {
  std::istringstream in(
      "src_kp_id\tdst_kp_id\tscore\n"
      "a\tb\t0.5\n"
      "b\ta\t1.2\n");
  auto e = parse_error([&] { read_score_matrix(in, "x.tsv"); });
  EXPECT_EQ(e.file(), "x.tsv");
  EXPECT_EQ(e.record(), 3u);
  EXPECT_EQ(e.field(), "score");
}

TEST(ScoreFile, DuplicatePair) {
  std::istringstream in(
      "src_kp_id\tdst_kp_id\tscore\n"
      "a\tb\t0.5\n"
      "b\ta\t0.5\n"
      "a\tb\t0.7\n");
  auto e = parse_error([&] { read_score_matrix(in, "x.tsv"); });
  EXPECT_EQ(e.record(), 4u);
  EXPECT_NE(std::string(e.what()).find("first at record 2"), std::string::npos);
}

TEST(ScoreFile, MissingPair) {
  std::istringstream in(
      "src_kp_id\tdst_kp_id\tscore\n"
      "a\tb\t0.5\n"
      "b\ta\t0.5\n"
      "a\tc\t0.5\n");
  auto e = parse_error([&] { read_score_matrix(in, "x.tsv"); });
  EXPECT_NE(std::string(e.what()).find("3 missing pair(s)"), std::string::npos);
}

TEST(ScoreFile, DeclaredUniverseAndIgnoredIds) {
  std::istringstream in(
      "src_kp_id\tdst_kp_id\tscore\n"
      "b\ta\t0.1\n"
      "a\tb\t0.2\n"
      "a\tz\t0.3\n");
  std::vector<KeyPointId> declared{"a", "b"};
  std::set<KeyPointId> ignore{"z"};
  ScoreMatrix s = read_score_matrix(in, "x.tsv", &declared, &ignore);
  EXPECT_EQ(s.ids(), declared);
  EXPECT_DOUBLE_EQ(s(1, 0), 0.1);

  std::istringstream again(
      "src_kp_id\tdst_kp_id\tscore\n"
      "a\tb\t0.2\n"
      "b\ta\t0.1\n"
      "a\tq\t0.3\n");
  auto e = parse_error([&] { read_score_matrix(again, "x.tsv", &declared, &ignore); });
  EXPECT_EQ(e.field(), "dst_kp_id");
  EXPECT_EQ(e.record(), 4u);
}

TEST(ScoreFile, BadHeaderAndNumbers) {
  std::istringstream bad_header("src\tdst\tscore\n");
  EXPECT_EQ(parse_error([&] { read_score_matrix(bad_header, "x"); }).record(), 1u);
  std::istringstream bad_number("src_kp_id\tdst_kp_id\tscore\na\tb\tabc\n");
  EXPECT_EQ(parse_error([&] { read_score_matrix(bad_number, "x"); }).field(), "score");
}

TEST(MatchMatrixCsv, RoundTrip) {
  const std::string text =
      "sentence_id,k1,k2\n"
      "s1,0.900000,0.100000\n"
      "s2,0.000000,0.600000\n";
  std::istringstream in(text);
  MatchMatrix m = read_match_matrix(in, "m.csv");
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 2u);
  EXPECT_DOUBLE_EQ(m(1, 1), 0.6);
  std::ostringstream out;
  write_match_matrix(out, m);
  EXPECT_EQ(out.str(), text);
}

TEST(MatchMatrixCsv, MalformedRows) {
  std::istringstream short_row("sentence_id,k1,k2\ns1,0.5\n");
  auto e = parse_error([&] { read_match_matrix(short_row, "m.csv"); });
  EXPECT_EQ(e.record(), 2u);
  std::istringstream range("sentence_id,k1\ns1,0.5\ns2,1.5\n");
  auto r = parse_error([&] { read_match_matrix(range, "m.csv"); });
  EXPECT_EQ(r.record(), 3u);
  EXPECT_EQ(r.field(), "k1");
  std::istringstream header("id,k1\ns1,0.5\n");
  EXPECT_EQ(parse_error([&] { read_match_matrix(header, "m.csv"); }).record(), 1u);
}

TEST(KeyPointsJsonl, RoundTrip) {
  const std::string text =
      "{\"filtered\":false,\"id\":\"k1\",\"match_count\":4,\"polarity\":\"positive\","
      "\"text\":\"Friendly staff\"}\n"
      "{\"filtered\":true,\"id\":\"k2\",\"match_count\":0,\"polarity\":\"positive\","
      "\"text\":\"Bad\"}\n";
  std::istringstream in(text);
  KeyPointSet kps("s", Domain::kHotels, read_key_points(in, "kp.jsonl"));
  EXPECT_EQ(kps.size(), 2u);
  EXPECT_EQ(kps.filtered_count(), 1u);
  std::ostringstream out;
  write_key_points(out, kps);
  EXPECT_EQ(out.str(), text);
}

TEST(KeyPointsJsonl, ErrorsNameTheField) {
  std::istringstream in("{\"id\":\"k1\",\"text\":\"x\",\"polarity\":\"sideways\"}\n");
  EXPECT_EQ(parse_error([&] { read_key_points(in, "kp.jsonl"); }).field(), "polarity");
  std::istringstream mixed(
      "{\"id\":\"k1\",\"text\":\"x\",\"polarity\":\"positive\",\"match_count\":1}\n"
      "{\"id\":\"k2\",\"text\":\"y\",\"polarity\":\"negative\",\"match_count\":1}\n");
  auto e = parse_error([&] { read_key_points(mixed, "kp.jsonl"); });
  EXPECT_EQ(e.record(), 2u);
  EXPECT_EQ(e.field(), "polarity");
  std::istringstream broken("{\"id\":\"k1\"\n");
  EXPECT_EQ(parse_error([&] { read_key_points(broken, "kp.jsonl"); }).record(), 1u);
}

TEST(HierarchyJsonl, RoundTrip) {
  Hierarchy h;
  h.summary_id = "s";
  h.domain = Domain::kPC;
  h.clusters = {{"a", "b"}, {"c"}};
  h.edges = {{1, 0}};
  std::ostringstream out;
  write_hierarchy(out, h);
  EXPECT_EQ(out.str(),
            "{\"clusters\":[[\"a\",\"b\"],[\"c\"]],\"domain\":\"PC\",\"edges\":[[1,0]],"
            "\"summary_id\":\"s\"}\n");
  std::istringstream in(out.str());
  auto back = read_hierarchies(in, "h.jsonl");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_TRUE(same_structure(back[0], h));
  EXPECT_EQ(back[0].domain, Domain::kPC);
}

TEST(HierarchyJsonl, DuplicateSummaryAndBadEdge) {
  std::istringstream dup("{\"summary_id\":\"s\",\"clusters\":[]}\n"
                         "{\"summary_id\":\"s\",\"clusters\":[]}\n");
  EXPECT_EQ(parse_error([&] { read_hierarchies(dup, "h"); }).record(), 2u);
  std::istringstream edge("{\"summary_id\":\"s\",\"clusters\":[[\"a\"]],\"edges\":[[0]]}\n");
  EXPECT_EQ(parse_error([&] { read_hierarchies(edge, "h"); }).field(), "edges");
}

TEST(WeakLabelsJsonl, Layout) {
  WeakLabelSet set;
  set.records.push_back({"s", "k1", "k2", "Great staff", "Good \"service\"",
                         WeakLabel::kEntail, 0.75});
  std::ostringstream out;
  write_weak_labels(out, set);
  EXPECT_EQ(out.str(),
            "{\"premise\":\"Great staff\",\"hypothesis\":\"Good \\\"service\\\"\","
            "\"label\":\"entail\",\"score\":0.750000,\"summary_id\":\"s\","
            "\"premise_id\":\"k1\",\"hypothesis_id\":\"k2\"}\n");
}

TEST(SummarySet, LoadsSortedDirectories) {
  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() / "kph_io_test_set";
  fs::remove_all(root);
  fs::create_directories(root / "b_summary");
  fs::create_directories(root / "a_summary");
  fs::create_directories(root / "not_a_summary");
  std::ofstream(root / "b_summary" / kSummaryFile) << "{\"domain\":\"hotels\"}";
  std::ofstream(root / "a_summary" / kGoldFile)
      << "{\"summary_id\":\"a_summary\",\"domain\":\"restaurants\","
         "\"clusters\":[[\"x\"],[\"y\"]],\"edges\":[[0,1]]}\n";
  std::ofstream(root / "a_summary" / kKeyPointsFile)
      << "{\"id\":\"x\",\"text\":\"X\",\"polarity\":\"positive\",\"match_count\":5}\n"
         "{\"id\":\"y\",\"text\":\"Y\",\"polarity\":\"positive\",\"match_count\":2}\n"
         "{\"id\":\"z\",\"text\":\"Z\",\"polarity\":\"positive\",\"match_count\":0,"
         "\"filtered\":true}\n";
  auto set = load_summary_set(root);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set[0].summary_id, "a_summary");
  EXPECT_EQ(set[0].domain, Domain::kRestaurants);
  EXPECT_EQ(set[1].domain, Domain::kHotels);
  auto st = dataset_statistics(set);
  EXPECT_EQ(st.total.hierarchies, 1u);
  EXPECT_EQ(st.total.key_points, 3u);
  EXPECT_EQ(st.total.filtered, 1u);
  EXPECT_EQ(st.total.relations, 1u);
  fs::remove_all(root);
}

}  // namespace
}  // namespace kph::io
