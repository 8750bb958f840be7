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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kph/scoring.hpp"
#include "oracles.hpp"

namespace kph {
namespace {

FeatureVector fv(std::vector<double> w, double theta = 0.5) {
  return FeatureVector::from_weights("kp", std::move(w), theta);
}

// Weights whose support under theta = 0.5 is exactly `members` (value 0.9),
// everything else 0.1.
FeatureVector binary(std::size_t len, std::initializer_list<std::size_t> members) {
  std::vector<double> w(len, 0.1);
  for (auto m : members) w[m] = 0.9;
  return fv(w);
}

TEST(FeatureVectors, SupportThresholding) {
  EXPECT_TRUE(fv({0.0, 0.0, 0.0}).support.empty());
  EXPECT_EQ(fv({0.9, 0.4, 0.5}).support, (std::vector<std::size_t>{0, 2}));
}

TEST(FeatureVectors, BuiltFromMatchMatrixColumns) {
  MatchMatrix m({"s1", "s2", "s3"}, {"a", "b"}, {0.7, 0.2,   //
                                                 0.3, 0.6,   //
                                                 0.5, 0.55});
  auto fvs = build_feature_vectors(m, 0.5);
  ASSERT_EQ(fvs.size(), 2u);
  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<std::size_t> scan;
    for (std::size_t r = 0; r < 3; ++r)
      if (m(r, c) >= 0.5) scan.push_back(r);
    EXPECT_EQ(fvs[c].support, scan);
    EXPECT_EQ(fvs[c].weights, m.column(c));
  }
  EXPECT_EQ(fvs[0].support, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(fvs[1].support, (std::vector<std::size_t>{1, 2}));
  EXPECT_THROW(build_feature_vectors(m, 1.5), std::invalid_argument);
  EXPECT_THROW(build_feature_vectors(MatchMatrix({}, {"a"}, {})), DataError);
}

TEST(MatchMatrix, RejectsOutOfRange) {
  EXPECT_THROW(MatchMatrix({"s"}, {"a"}, {1.2}), DataError);
  EXPECT_THROW(MatchMatrix({"s"}, {"a", "b"}, {0.2}), DataError);
}

TEST(BinaryInclusion, Examples) {
  EXPECT_DOUBLE_EQ(score_binary_inclusion(binary(5, {1, 2}), binary(5, {1, 2, 3})), 1.0);
  EXPECT_DOUBLE_EQ(score_binary_inclusion(binary(5, {0, 1}), binary(5, {2, 3})), 0.0);
  EXPECT_DOUBLE_EQ(score_binary_inclusion(binary(5, {1, 2, 3}), binary(5, {2, 3, 4})),
                   2.0 / 3.0);
  EXPECT_DOUBLE_EQ(score_binary_inclusion(binary(5, {}), binary(5, {2})), 0.0);
  EXPECT_THROW(score_binary_inclusion(binary(4, {1}), binary(5, {1})), DataError);
}

TEST(BinaryInclusion, IsDirectional) {
  auto narrow = binary(6, {1, 2});
  auto broad = binary(6, {1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(score_binary_inclusion(narrow, broad), 1.0);
  EXPECT_DOUBLE_EQ(score_binary_inclusion(broad, narrow), 0.5);
}

TEST(WeedsPrec, Examples) {
  EXPECT_DOUBLE_EQ(score_weedsprec(fv({0.8, 0.2}, 0.1), fv({0.9, 0.0}, 0.1)), 0.8);
  EXPECT_DOUBLE_EQ(score_weedsprec(fv({0.8, 0.6, 0.0}), fv({0.5, 0.9, 0.7})), 1.0);
  EXPECT_DOUBLE_EQ(score_weedsprec(binary(4, {0}), binary(4, {1})), 0.0);
}

TEST(WeedsPrec, EqualsBinIncUnderConstantWeights) {
  std::mt19937_64 rng(31);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(12), b(12);
    for (auto& v : a) v = coin(rng) ? 0.7 : 0.0;
    for (auto& v : b) v = coin(rng) ? 0.7 : 0.0;
    EXPECT_NEAR(score_weedsprec(fv(a), fv(b)), score_binary_inclusion(fv(a), fv(b)), 1e-12);
  }
}

TEST(ClarkeDE, Examples) {
  auto f = fv({0.6, 0.9, 0.55});
  EXPECT_DOUBLE_EQ(score_clarkede(f, f), 1.0);
  EXPECT_DOUBLE_EQ(score_clarkede(binary(4, {0}), binary(4, {1})), 0.0);
  EXPECT_NEAR(score_clarkede(fv({0.6, 0.4}, 0.1), fv({0.3, 0.0}, 0.1)), 0.3, 1e-12);
}

TEST(APinc, IdenticalVectorsFrozenValue) {
  // Ranks agree: P(r) = 1 and rel = 1 - r/4 for r = 1..3, so
  // (0.75 + 0.5 + 0.25) / 3.
  auto f = fv({0.9, 0.7, 0.6});
  EXPECT_NEAR(score_apinc(f, f), 0.5, 1e-12);
  EXPECT_NEAR(score_apinc(f, f), oracle::apinc(f.weights, f.weights, 0.5), 1e-12);
}

TEST(APinc, DisjointIsZero) {
  EXPECT_DOUBLE_EQ(score_apinc(binary(4, {0, 1}), binary(4, {2, 3})), 0.0);
  EXPECT_DOUBLE_EQ(score_apinc(binary(4, {}), binary(4, {2, 3})), 0.0);
}

TEST(APinc, TopRankedInclusionBeatsEveryLowerPlacement) {
  // i's two features are {0, 1}; j covers all five features with a
  // permutation of distinct weights.
  auto fi = fv({0.9, 0.8, 0.0, 0.0, 0.0});
  std::vector<double> levels{0.95, 0.85, 0.75, 0.65, 0.55};
  std::vector<std::size_t> perm{0, 1, 2, 3, 4};
  double top = 2.0, other = -1.0;
  do {
    std::vector<double> wj(5);
    for (std::size_t f = 0; f < 5; ++f) wj[f] = levels[perm[f]];
    const double v = score_apinc(fi, fv(wj));
    EXPECT_NEAR(v, oracle::apinc(fi.weights, wj, 0.5), 1e-12);
    const bool i_on_top = perm[0] < 2 && perm[1] < 2;
    if (i_on_top)
      top = std::min(top, v);
    else
      other = std::max(other, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_NEAR(top, 0.75, 1e-12);
  EXPECT_LT(other, top);
}

TEST(Scorers, MatchDirectFormulaOracles) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t len = 1 + rng() % 15;
    std::vector<double> a(len), b(len);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    const double theta = t % 3 == 0 ? 0.3 : 0.5;
    auto fa = fv(a, theta), fb = fv(b, theta);
    EXPECT_NEAR(score_binary_inclusion(fa, fb), oracle::bininc(a, b, theta), 1e-9);
    EXPECT_NEAR(score_weedsprec(fa, fb), oracle::weedsprec(a, b, theta), 1e-9);
    EXPECT_NEAR(score_clarkede(fa, fb), oracle::clarkede(a, b, theta), 1e-9);
    EXPECT_NEAR(score_apinc(fa, fb), oracle::apinc(a, b, theta), 1e-9);
    for (Scorer s : {Scorer::kBinInc, Scorer::kAPinc, Scorer::kWeedsPrec, Scorer::kClarkeDE}) {
      const double v = score_pair(s, fa, fb);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Scorers, ParseNames) {
  EXPECT_EQ(parse_scorer("bininc"), Scorer::kBinInc);
  EXPECT_EQ(parse_scorer("clarkede"), Scorer::kClarkeDE);
  EXPECT_FALSE(parse_scorer("cosine").has_value());
}

TEST(ScoreMatchMatrix, RecordsProvenance) {
  MatchMatrix m({"s1", "s2", "s3"}, {"a", "b"}, {0.9, 0.9, 0.1, 0.8, 0.1, 0.1});
  ScoreMatrix s = score_match_matrix(m, Scorer::kBinInc, "sum", 0.5);
  EXPECT_DOUBLE_EQ(s.at("a", "b"), 1.0);
  EXPECT_DOUBLE_EQ(s.at("b", "a"), 0.5);
  EXPECT_EQ(s.provenance().at("scorer"), "bininc");
  EXPECT_EQ(s.provenance().at("theta_m"), "0.500000");
}

ScoreMatrix matrix(std::vector<double> values, std::string id = "s") {
  const std::size_t n = static_cast<std::size_t>(std::lround(std::sqrt(values.size())));
  return ScoreMatrix(std::move(id), oracle::make_ids(n), std::move(values));
}

TEST(CombineAverage, Examples) {
  auto a = matrix({0, 0.2, 0.4, 0});
  auto b = matrix({0, 0.8, 0.6, 0});
  auto c = combine_average(a, b);
  EXPECT_DOUBLE_EQ(c.at("k0", "k1"), 0.5);
  EXPECT_DOUBLE_EQ(c.at("k1", "k0"), 0.5);
  auto same = combine_average(a, a);
  EXPECT_DOUBLE_EQ(same.at("k0", "k1"), 0.2);
  EXPECT_DOUBLE_EQ(same.at("k1", "k0"), 0.4);
  EXPECT_THROW(combine_average(a, matrix({0, 0.1, 0.1, 0}, "other")), DataError);
  EXPECT_THROW(combine_average(a, matrix({0, 0, 0, 0, 0, 0, 0, 0, 0})), DataError);
}

TEST(CombineAverage, SymmetricAndMatchesElementwiseMean) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 50; ++t) {
    auto a = oracle::random_scores(rng, 6), b = oracle::random_scores(rng, 6);
    auto ab = combine_average(a, b), ba = combine_average(b, a);
    std::vector<double> mean, got;
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        if (i == j) continue;
        EXPECT_DOUBLE_EQ(ab(i, j), ba(i, j));
        mean.push_back(a(i, j) / 2 + b(i, j) / 2);
        got.push_back(ab(i, j));
        // Order preserved where both inputs agree.
        for (std::size_t k = 0; k < 6; ++k)
          for (std::size_t l = 0; l < 6; ++l)
            if (k != l && a(i, j) > a(k, l) && b(i, j) > b(k, l)) {
              EXPECT_GT(ab(i, j), ab(k, l));
            }
      }
    std::vector<std::size_t> o1(mean.size()), o2(mean.size());
    std::iota(o1.begin(), o1.end(), 0);
    std::iota(o2.begin(), o2.end(), 0);
    std::stable_sort(o1.begin(), o1.end(), [&](auto x, auto y) { return mean[x] < mean[y]; });
    std::stable_sort(o2.begin(), o2.end(), [&](auto x, auto y) { return got[x] < got[y]; });
    EXPECT_EQ(o1, o2);
  }
}

std::vector<WeakLabelRecord> candidates(const std::vector<double>& scores) {
  std::vector<WeakLabelRecord> out;
  for (std::size_t k = 0; k < scores.size(); ++k)
    out.push_back({"s", "p" + std::to_string(k), "h" + std::to_string(k),
                   "premise " + std::to_string(k), "hypothesis " + std::to_string(k),
                   WeakLabel::kNeutral, scores[k]});
  return out;
}

TEST(WeakLabels, FewerNegativesThanRatioTakesAll) {
  auto set = sample_weak_labels(candidates({0.6, 0.4, 0.3}), {0.5, 5.0, 1});
  EXPECT_EQ(set.positives, 1u);
  EXPECT_EQ(set.negatives, 2u);
  ASSERT_EQ(set.records.size(), 3u);
  EXPECT_EQ(set.records[0].label, WeakLabel::kEntail);
  EXPECT_EQ(set.records[1].label, WeakLabel::kNeutral);
}

TEST(WeakLabels, ExactRatioAndDeterminism) {
  std::mt19937_64 rng(34);
  std::vector<double> scores(100);
  for (std::size_t k = 0; k < 100; ++k)
    scores[k] = k < 10 ? 0.55 + 0.04 * double(k) : 0.5 * double(rng() % 1000) / 1000.0;
  std::shuffle(scores.begin(), scores.end(), rng);
  auto a = sample_weak_labels(candidates(scores), {0.5, 5.0, 7});
  auto b = sample_weak_labels(candidates(scores), {0.5, 5.0, 7});
  auto c = sample_weak_labels(candidates(scores), {0.5, 5.0, 8});
  EXPECT_EQ(a.positives, 10u);
  EXPECT_EQ(a.negatives, 50u);
  EXPECT_EQ(a.records.size(), 60u);
  std::size_t entail = 0;
  for (const auto& r : a.records) {
    entail += r.label == WeakLabel::kEntail;
    EXPECT_EQ(r.label == WeakLabel::kEntail, r.score > 0.5);
  }
  EXPECT_EQ(entail, 10u);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k)
    EXPECT_EQ(a.records[k].premise_id, b.records[k].premise_id);
  bool differs = false;
  for (std::size_t k = 0; k < a.records.size(); ++k)
    differs |= a.records[k].premise_id != c.records[k].premise_id;
  EXPECT_TRUE(differs);
}

TEST(WeakLabels, NoPositivesFlagged) {
  auto set = sample_weak_labels(candidates({0.1, 0.2}), {0.5, 5.0, 1});
  EXPECT_TRUE(set.no_positives);
  EXPECT_TRUE(set.records.empty());
}

TEST(WeakLabels, RejectsBadConfig) {
  EXPECT_THROW(sample_weak_labels(candidates({0.6}), {1.0, 5.0, 1}), std::invalid_argument);
  EXPECT_THROW(sample_weak_labels(candidates({0.6}), {0.5, 0.5, 1}), std::invalid_argument);
}

TEST(WeakLabels, FromScoreMatrixUsesKeyPointText) {
  auto s = matrix({0, 0.9, 0.2, 0});
  KeyPointSet kps("s", Domain::kHotels,
                  {{"k0", "Beds were awesome", Polarity::kPositive, 3, false},
                   {"k1", "Rooms are comfortable", Polarity::kPositive, 9, false}});
  auto set = export_weak_labels(s, kps, {0.5, 5.0, 3});
  ASSERT_EQ(set.records.size(), 2u);
  EXPECT_EQ(set.records[0].premise, "Beds were awesome");
  EXPECT_EQ(set.records[0].hypothesis, "Rooms are comfortable");
  EXPECT_EQ(set.records[0].label, WeakLabel::kEntail);
}

}  // namespace
}  // namespace kph
