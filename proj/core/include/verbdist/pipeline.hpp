#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "verbdist/annotations.hpp"
#include "verbdist/metrics.hpp"
#include "verbdist/model.hpp"
#include "verbdist/statistics.hpp"
#include "verbdist/synthetic.hpp"

namespace verbdist {

struct VideoClass {
  std::string video_id;
  std::string class_label;
};

struct FoldAssignment {
  int n_folds = 0;
  std::map<std::string, int> fold_of;  // video_id -> fold index

  std::vector<std::string> videos_in(int fold) const;
};

// Stratified split: videos of each class are shuffled with the seeded
// generator and dealt round-robin, continuing the deal position from one
// class to the next so folds stay balanced overall. Per class, fold sizes
// differ by at most one.
//
// Throws ConfigError when n_folds < 2 or exceeds the number of videos, and
// InputError on duplicate video ids.
FoldAssignment make_folds(std::span<const VideoClass> videos, int n_folds,
                          std::uint64_t seed);

struct ExperimentConfig {
  int n_folds = 5;
  std::uint64_t seed = 0;
  std::vector<double> alphas = default_alphas();
  TrainConfig proposed;  // trained on annotation distributions
  TrainConfig baseline;  // trained on majority-vote one-hot targets
  int top_k_pairs = 40;
  double cooccurrence_alpha = 0.5;

  ExperimentConfig();
};

// Throws ConfigError for inconsistent settings.
void validate(const ExperimentConfig& config);

struct MethodResult {
  double classification_accuracy = 0.0;
  std::vector<SweepRow> sweep;
};

struct FoldResult {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  MethodResult proposed;
  MethodResult baseline;
  std::vector<double> proposed_loss;
  std::vector<double> baseline_loss;
};

// Arithmetic mean over folds. Per alpha, only folds with surviving videos
// contribute; `folds_with_videos` counts them.
struct MeanSweepRow {
  double alpha = 0.0;
  int folds_with_videos = 0;
  double accuracy = 0.0;
};
struct MeanResult {
  double classification_accuracy = 0.0;
  std::vector<MeanSweepRow> sweep;
};

struct AnnotationStatistics {
  std::map<std::string, Summary> verbs_per_annotator;
  std::map<std::string, std::size_t> unique_verbs;
  std::vector<std::int64_t> verb_counts;
  std::vector<std::string> dataset_tags;
  std::vector<SymmetricPair> top_pairs;
};

AnnotationStatistics annotation_statistics(std::span<const AnnotationRecord> records,
                                           std::size_t vocab_size, int top_k);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::string> verbs;
  std::string vocab_hash;
  std::size_t n_videos = 0;

  std::vector<FoldResult> folds;
  MeanResult proposed_mean;
  MeanResult baseline_mean;

  // Scores over the union of all test folds.
  MethodResult proposed_pooled;
  MethodResult baseline_pooled;
  std::vector<PerVerbError> proposed_verb_error;
  std::vector<PerVerbError> baseline_verb_error;

  // Predicted co-occurrences from proposed test predictions binarized at
  // config.cooccurrence_alpha, one matrix per dataset tag.
  std::vector<std::string> dataset_tags;
  std::vector<SymmetricPair> predicted_top_pairs;

  AnnotationStatistics annotation_stats;

  // Squared correlation between annotated-set size and proposed per-video
  // score at alpha = 0.5; absent when either side has zero variance.
  std::optional<CorrelationReport> size_score_correlation;

  // Held-out predictions, rows in video-id order. Not part of the
  // structured report.
  PredictionMatrix proposed_predictions;
  PredictionMatrix baseline_predictions;
  DistributionTable labels;

  std::string started_at;
  std::string finished_at;
};

// Cross-validated comparison of the distribution-trained model against the
// majority-vote baseline. Errors are rethrown with fold and stage context
// (same exception type).
ExperimentReport run_experiment(const VerbVocabulary& vocab,
                                std::span<const AnnotationRecord> records,
                                const DistributionTable& features,
                                const ExperimentConfig& config);

ExperimentReport run_experiment(const std::filesystem::path& vocab_path,
                                const std::filesystem::path& records_path,
                                const std::filesystem::path& features_path,
                                const ExperimentConfig& config);

// Fixed synthetic corpus and training settings used by the acceptance suite
// and the `--preset benchmark` CLI option.
SynthConfig benchmark_synth_config();
ExperimentConfig benchmark_experiment_config();
VerbVocabulary benchmark_vocabulary();

}  // namespace verbdist
