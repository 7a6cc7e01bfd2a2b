#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "verbdist/annotations.hpp"
#include "verbdist/metrics.hpp"

namespace verbdist {

// Ground truth for one simulated interaction class.
struct LatentClass {
  std::string class_id;
  LabelDistribution profile;          // per-verb selection probability
  Eigen::VectorXd feature_centroid;
};

struct SynthConfig {
  int n_classes = 20;
  int n_videos = 600;
  int workers_min = 30;
  int workers_max = 50;
  int feature_dim = 32;
  double feature_noise_sigma = 1.0;
  int profile_sparsity = 5;
  std::uint64_t seed = 0;
  std::string dataset_tag = "synthetic";
};

// Throws ConfigError for non-positive counts, an inverted worker range or a
// negative noise scale.
void validate(const SynthConfig& config);

struct SyntheticCorpus {
  std::vector<AnnotationRecord> records;
  DistributionTable features;             // one row per video
  std::vector<LatentClass> classes;
  std::vector<std::size_t> video_class;   // class index per features row
};

// Draws sparse class profiles and centroids, then simulates the corpus.
//
// Profiles: `profile_sparsity` verbs per class carry most of the mass; the
// first is dominant with probability in [0.55, 0.95]. Verbs (2m, 2m+1) of the
// vocabulary act as near-synonyms: when one is picked, its partner is often
// picked too with a similar probability, so the same high co-occurrence pairs
// appear across classes. A sprinkle of low background probabilities models
// rare but legitimate verbs.
SyntheticCorpus generate(const SynthConfig& config, const VerbVocabulary& vocab);

// Simulates a corpus for fixed classes. Video v belongs to class
// v % classes.size(). Each worker picks verb j independently with probability
// profile(j); empty selections are redrawn. Features are the class centroid
// plus isotropic Gaussian noise.
SyntheticCorpus generate(const SynthConfig& config, const VerbVocabulary& vocab,
                         std::vector<LatentClass> classes);

// |p(j) - profile(j)| for every aggregated video (row) and verb (column),
// in the order of `aggregated`.
Eigen::MatrixXd truth_deviation(std::span<const VideoAnnotation> aggregated,
                                const SyntheticCorpus& corpus);

// Per-verb maximum of truth_deviation over videos.
std::vector<double> truth_gap(std::span<const VideoAnnotation> aggregated,
                              const SyntheticCorpus& corpus);

}  // namespace verbdist
