#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"
#include "verbdist/error.hpp"
#include "verbdist/synthetic.hpp"

namespace verbdist {
namespace {

using testing::letters;

LatentClass fixed_class(std::string id, std::vector<double> profile, int dim) {
  LatentClass c;
  c.class_id = std::move(id);
  c.profile = Eigen::Map<const Eigen::VectorXd>(profile.data(),
                                                static_cast<Eigen::Index>(profile.size()));
  c.feature_centroid = Eigen::VectorXd::LinSpaced(dim, -1.0, 1.0);
  return c;
}

SynthConfig small_config(int videos, int workers) {
  SynthConfig config;
  config.n_classes = 1;
  config.n_videos = videos;
  config.workers_min = workers;
  config.workers_max = workers;
  config.feature_dim = 4;
  config.profile_sparsity = 2;
  config.seed = 5;
  return config;
}

TEST(SyntheticTest, ZeroNoiseGivesCentroidFeatures) {
  auto config = small_config(6, 3);
  config.feature_noise_sigma = 0.0;
  const auto corpus =
      generate(config, letters(3), {fixed_class("c", {0.9, 0.2, 0.0}, 4)});
  ASSERT_EQ(corpus.features.rows(), 6u);
  for (Eigen::Index r = 0; r < corpus.features.values.rows(); ++r) {
    EXPECT_EQ(corpus.features.values.row(r), corpus.features.values.row(0));
    EXPECT_EQ(corpus.features.values.row(r).transpose(),
              corpus.classes[0].feature_centroid);
  }
}

TEST(SyntheticTest, OneHotProfileGivesSingleVerbSelections) {
  const auto corpus = generate(small_config(10, 7), letters(4),
                               {fixed_class("c", {0.0, 0.0, 1.0, 0.0}, 4)});
  EXPECT_EQ(corpus.records.size(), 70u);
  for (const auto& r : corpus.records) EXPECT_EQ(r.verbs_selected, (std::set<VerbIndex>{2}));
  const auto videos = aggregate(corpus.records, letters(4));
  for (const auto& v : videos) {
    EXPECT_EQ(v.annotator_count, 7);
    EXPECT_EQ(v.distribution, Eigen::Vector4d(0, 0, 1, 0));
  }
}

TEST(SyntheticTest, AggregatedRatesStayInBinomialBand) {
  // With 40 workers and p = 0.6 a deviation above 0.25 needs X <= 13 or
  // X >= 35 selections.
  const double tail = oracle::binomial_outside(40, 0.6, 13, 35);
  ASSERT_LT(tail, 1e-3);
  const auto vocab = letters(2);
  const auto corpus =
      generate(small_config(300, 40), vocab, {fixed_class("c", {0.6, 0.99}, 4)});
  const auto videos = aggregate(corpus.records, vocab);
  int outside = 0;
  for (const auto& v : videos) {
    if (std::abs(v.distribution[0] - 0.6) > 0.25) ++outside;
  }
  // Expected count is 300 * tail < 0.3.
  EXPECT_LE(outside, 3);
}

TEST(SyntheticTest, DeterministicForSeed) {
  SynthConfig config;
  config.n_videos = 40;
  config.seed = 11;
  const auto vocab = letters(12);
  const auto a = generate(config, vocab);
  const auto b = generate(config, vocab);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].video_id, b.records[i].video_id);
    EXPECT_EQ(a.records[i].worker_id, b.records[i].worker_id);
    EXPECT_EQ(a.records[i].verbs_selected, b.records[i].verbs_selected);
  }
  EXPECT_EQ(a.features.values, b.features.values);
  config.seed = 12;
  EXPECT_NE(generate(config, vocab).features.values, a.features.values);
}

TEST(SyntheticTest, GeneratedCorpusRespectsConfig) {
  SynthConfig config;
  config.n_classes = 4;
  config.n_videos = 20;
  config.workers_min = 3;
  config.workers_max = 6;
  config.seed = 3;
  const auto vocab = letters(10);
  const auto corpus = generate(config, vocab);
  EXPECT_EQ(corpus.classes.size(), 4u);
  EXPECT_EQ(corpus.features.values.cols(), config.feature_dim);
  for (const auto& c : corpus.classes) {
    EXPECT_GE(c.profile.maxCoeff(), 0.5);
    EXPECT_LE(c.profile.maxCoeff(), 1.0);
    EXPECT_GE(c.profile.minCoeff(), 0.0);
  }
  const auto videos = aggregate(corpus.records, vocab);
  ASSERT_EQ(videos.size(), 20u);
  for (std::size_t v = 0; v < videos.size(); ++v) {
    EXPECT_GE(videos[v].annotator_count, 3);
    EXPECT_LE(videos[v].annotator_count, 6);
    EXPECT_EQ(videos[v].class_label, corpus.classes[corpus.video_class[v]].class_id);
  }
}

TEST(SyntheticTest, SingleWorkerTruthGap) {
  const std::vector<double> profile = {0.7, 0.3, 0.5};
  const auto vocab = letters(3);
  const auto corpus = generate(small_config(50, 1), vocab, {fixed_class("c", profile, 4)});
  const auto videos = aggregate(corpus.records, vocab);
  const auto gap = truth_gap(videos, corpus);
  // One worker can only report 0 or 1.
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_GE(gap[j], std::min(profile[j], 1.0 - profile[j]) - 1e-12);
  }
}

TEST(SyntheticTest, DeviationShrinksWithMoreWorkers) {
  const auto vocab = letters(3);
  const std::vector<double> p = {0.7, 0.3, 0.5};
  const std::vector<LatentClass> classes = {fixed_class("c", p, 4)};
  // Empty selections are redrawn, so the expected rate is conditioned on a
  // non-empty pick.
  const double nonempty = 1.0 - (1.0 - p[0]) * (1.0 - p[1]) * (1.0 - p[2]);
  auto mean_dev = [&](int workers) {
    const auto corpus = generate(small_config(40, workers), vocab, classes);
    const auto videos = aggregate(corpus.records, vocab);
    double total = 0.0;
    for (const auto& v : videos) {
      for (std::size_t j = 0; j < 3; ++j) {
        total += std::abs(v.distribution[static_cast<Eigen::Index>(j)] - p[j] / nonempty);
      }
    }
    return total / (3.0 * static_cast<double>(videos.size()));
  };
  const double few = mean_dev(4);
  const double many = mean_dev(400);
  EXPECT_LT(many, few);
  // sqrt(p(1-p)/400) is at most 0.025.
  EXPECT_LT(many, 0.025);
}

TEST(SyntheticTest, TruthDeviationMatchesDirectDifference) {
  const auto vocab = letters(3);
  const auto corpus =
      generate(small_config(5, 10), vocab, {fixed_class("c", {0.9, 0.4, 0.2}, 4)});
  const auto videos = aggregate(corpus.records, vocab);
  const Eigen::MatrixXd dev = truth_deviation(videos, corpus);
  for (std::size_t v = 0; v < videos.size(); ++v) {
    const auto row = static_cast<Eigen::Index>(v);
    EXPECT_EQ(dev.row(row).transpose(),
              (videos[v].distribution - corpus.classes[0].profile).cwiseAbs());
  }
}

TEST(SyntheticTest, RejectsBadConfigs) {
  SynthConfig config;
  config.profile_sparsity = 8;
  EXPECT_THROW(generate(config, letters(5)), ConfigError);
  config = SynthConfig{};
  config.workers_min = 10;
  config.workers_max = 5;
  EXPECT_THROW(validate(config), ConfigError);
  config = SynthConfig{};
  config.feature_noise_sigma = -1.0;
  EXPECT_THROW(validate(config), ConfigError);
  EXPECT_THROW(generate(small_config(4, 2), letters(2), {fixed_class("c", {0.2, 0.1}, 4)}),
               InputError);
  EXPECT_THROW(generate(small_config(4, 2), letters(2), {fixed_class("c", {0.9, 0.1}, 3)}),
               InputError);
}

}  // namespace
}  // namespace verbdist
