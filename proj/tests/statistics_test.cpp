#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"
#include "verbdist/error.hpp"
#include "verbdist/statistics.hpp"

namespace verbdist {
namespace {

using testing::record;

TEST(CooccurrenceTest, HandCorpus) {
  // a=0, b=1, c=2: {a,b}, {a,b}, {a,c}
  const std::vector<AnnotationRecord> records = {
      record("x", "1", {0, 1}), record("x", "2", {0, 1}), record("x", "3", {0, 2})};
  const auto m = cooccurrence_counts(records, 3, "hand");
  EXPECT_EQ(m.counts(0, 1), 2);
  EXPECT_EQ(m.counts(0, 2), 1);
  EXPECT_EQ(m.counts(1, 2), 0);
  EXPECT_EQ(m.counts(0, 0), 0);
  EXPECT_DOUBLE_EQ(m.row_normalized(0, 1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.row_normalized(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.symmetric(0, 1), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(m.symmetric(0, 2), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.symmetric(1, 2), 0.0);
  EXPECT_EQ(m.dataset_tag, "hand");

  const auto brute = oracle::pair_counts({{0, 1}, {0, 1}, {0, 2}}, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(m.counts(i, j), brute[i][j]);
  }

  const std::vector<CooccurrenceMatrix> ms = {m};
  const auto top = top_symmetric_pairs(ms, 3);
  // (b,c) has S = 0 and is not a co-occurrence, so only two pairs survive.
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(std::make_pair(top[0].i, top[0].j), std::make_pair(VerbIndex{0}, VerbIndex{1}));
  EXPECT_EQ(std::make_pair(top[1].i, top[1].j), std::make_pair(VerbIndex{0}, VerbIndex{2}));
  EXPECT_DOUBLE_EQ(top[0].combined, 5.0 / 6.0);
}

TEST(CooccurrenceTest, NeverCoSelectedIsZeroAndEmptyRowsStayZero) {
  const std::vector<VerbSet> sets = {{0}, {1}, {0, 2}};
  const auto m = cooccurrence_counts(std::span<const VerbSet>(sets), 4);
  EXPECT_DOUBLE_EQ(m.symmetric(0, 1), 0.0);
  EXPECT_TRUE(m.row_normalized.row(3).isZero());
  EXPECT_TRUE(m.row_normalized.row(1).isZero());
  EXPECT_THROW(cooccurrence_counts(std::span<const VerbSet>(), 4), InputError);
}

TEST(TopPairsTest, SinglePairAndTruncation) {
  const std::vector<VerbSet> sets = {{0, 1}, {0, 1}};
  const std::vector<CooccurrenceMatrix> ms = {
      cooccurrence_counts(std::span<const VerbSet>(sets), 5)};
  const auto one = top_symmetric_pairs(ms, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].i, 0u);
  EXPECT_EQ(one[0].j, 1u);
  EXPECT_DOUBLE_EQ(one[0].combined, 1.0);
  EXPECT_EQ(top_symmetric_pairs(ms, 40).size(), 1u);
  EXPECT_THROW(top_symmetric_pairs(ms, 0), ConfigError);
}

TEST(TopPairsTest, CombinesDatasetsAndBreaksTiesLexicographically) {
  const std::vector<VerbSet> first = {{0, 1}, {2, 3}};
  const std::vector<VerbSet> second = {{2, 3}, {1, 4}};
  const std::vector<CooccurrenceMatrix> ms = {
      cooccurrence_counts(std::span<const VerbSet>(first), 5, "A"),
      cooccurrence_counts(std::span<const VerbSet>(second), 5, "B")};
  const auto top = top_symmetric_pairs(ms, 10);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].i, 2u);  // S = 1 in both datasets
  EXPECT_DOUBLE_EQ(top[0].combined, 2.0);
  EXPECT_EQ(top[0].per_dataset, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(std::make_pair(top[1].i, top[1].j), std::make_pair(VerbIndex{0}, VerbIndex{1}));
  EXPECT_EQ(std::make_pair(top[2].i, top[2].j), std::make_pair(VerbIndex{1}, VerbIndex{4}));
}

TEST(CooccurrenceProperty, MatchesBruteForceAndInvariantsHold) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const int records = 1 + static_cast<int>(rng() % 100);
    std::vector<VerbSet> sets;
    std::vector<std::set<std::size_t>> plain;
    for (int r = 0; r < records; ++r) {
      VerbSet s;
      for (std::size_t j = 0; j < n; ++j) {
        if (rng() % 3 == 0) s.insert(j);
      }
      if (s.empty()) s.insert(rng() % n);
      sets.push_back(s);
      plain.emplace_back(s.begin(), s.end());
    }
    const auto m = cooccurrence_counts(std::span<const VerbSet>(sets), n);
    const auto brute = oracle::pair_counts(plain, n);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        ASSERT_EQ(m.counts(a, b), brute[i][j]);
        EXPECT_EQ(m.symmetric(a, b), m.symmetric(b, a));
        EXPECT_GE(m.symmetric(a, b), 0.0);
        EXPECT_LE(m.symmetric(a, b), 1.0);
        row += m.row_normalized(a, b);
      }
      if (m.counts.row(static_cast<Eigen::Index>(i)).sum() > 0) EXPECT_NEAR(row, 1.0, 1e-9);
    }
  }
}

TEST(BinarizeTest, StrictThreshold) {
  Eigen::MatrixXd v(2, 3);
  v << 0.5, 0.6, 0.1,
       0.9, 0.2, 0.51;
  const auto sets = binarize(v, 0.5);
  EXPECT_EQ(sets[0], (VerbSet{1}));
  EXPECT_EQ(sets[1], (VerbSet{0, 2}));
}

TEST(SummaryTest, VerbsPerAnnotator) {
  const std::vector<AnnotationRecord> same = {record("a", "1", {0, 1, 2}, "Open"),
                                              record("a", "2", {0, 1, 3}, "Open"),
                                              record("b", "1", {1, 2, 3}, "Open")};
  const auto s = verbs_per_annotator(same).at("Open");
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.min, 3.0);
  EXPECT_DOUBLE_EQ(s.max, 3.0);

  const std::vector<AnnotationRecord> spread = {
      record("a", "1", {0, 1}, "Take"), record("a", "2", {0, 1, 2, 3}, "Take"),
      record("a", "3", {0, 1, 2, 3, 4, 5}, "Take"),
      record("a", "4", {0, 1, 2, 3, 4, 5, 6, 7}, "Take")};
  const auto t = verbs_per_annotator(spread).at("Take");
  EXPECT_DOUBLE_EQ(t.mean, 5.0);
  EXPECT_DOUBLE_EQ(t.median, 5.0);
  EXPECT_DOUBLE_EQ(t.min, 2.0);
  EXPECT_DOUBLE_EQ(t.max, 8.0);

  const auto single = verbs_per_annotator(
      std::vector<AnnotationRecord>{record("a", "1", {2, 4}, "One")}).at("One");
  for (double v : {single.min, single.q1, single.median, single.q3, single.max, single.mean}) {
    EXPECT_DOUBLE_EQ(v, 2.0);
  }
  EXPECT_THROW(verbs_per_annotator(std::vector<AnnotationRecord>{}), InputError);
}

TEST(SummaryTest, UniqueVerbsAndCounts) {
  const std::vector<AnnotationRecord> rs = {record("a", "1", {0, 1}, "X"),
                                            record("b", "1", {1, 2}, "X"),
                                            record("c", "1", {3}, "Y")};
  const auto u = unique_verbs_per_class(rs);
  EXPECT_EQ(u.at("X"), 3u);
  EXPECT_EQ(u.at("Y"), 1u);
  EXPECT_EQ(verb_counts(rs, 4), (std::vector<std::int64_t>{1, 2, 1, 1}));
}

TEST(RSquaredTest, KnownValues) {
  const std::vector<double> x = {1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  EXPECT_NEAR(r_squared(x, y).r_squared, 1.0, 1e-15);

  const std::vector<double> x3 = {1, 2, 3}, y3 = {1, 2, 2};
  EXPECT_NEAR(oracle::pearson_r2(x3, y3), 0.75, 1e-12);
  const auto report = r_squared(x3, y3, "len", "verbs");
  EXPECT_NEAR(report.r_squared, 0.75, 1e-12);
  EXPECT_EQ(report.n, 3u);
  EXPECT_EQ(report.x_name, "len");
}

TEST(RSquaredTest, IndependentSamplesNearZero) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n01;
  std::vector<double> x(1000), y(1000);
  for (auto& v : x) v = n01(rng);
  for (auto& v : y) v = n01(rng);
  const double r2 = r_squared(x, y).r_squared;
  EXPECT_LT(r2, 0.05);
  EXPECT_NEAR(r2, oracle::pearson_r2(x, y), 1e-9);
}

TEST(RSquaredTest, Errors) {
  const std::vector<double> flat = {2, 2, 2}, y = {1, 2, 3};
  EXPECT_THROW(r_squared(flat, y), InputError);
  EXPECT_THROW(r_squared(y, flat), InputError);
  EXPECT_THROW(r_squared(std::vector<double>{1}, std::vector<double>{1}), InputError);
  EXPECT_THROW(r_squared(y, std::vector<double>{1, 2}), InputError);
}

}  // namespace
}  // namespace verbdist
