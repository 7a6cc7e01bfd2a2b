#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "verbdist/statistics.hpp"
#include "verbdist/vocabulary.hpp"

namespace verbdist {

// Per-verb values for a set of videos, one row per video. Used both for
// annotated distributions and for model predictions.
struct DistributionTable {
  std::vector<std::string> video_ids;
  Eigen::MatrixXd values;

  std::size_t rows() const { return video_ids.size(); }
};
using PredictionMatrix = DistributionTable;

// Index of the largest entry, lowest index on ties.
VerbIndex argmax(const Eigen::Ref<const Eigen::VectorXd>& row);

// Fraction of rows whose argmax agrees. Throws InputError when the tables are
// empty or misaligned.
double accuracy_classification(const PredictionMatrix& predictions,
                               const DistributionTable& labels);

// { j : y(j) > alpha }. Throws ConfigError unless 0 < alpha < 1.
VerbSet annotated_set(const Eigen::Ref<const Eigen::VectorXd>& y, double alpha);

// Indices of the k largest entries, lowest index winning ties at the
// boundary. Throws ConfigError when k is 0 or exceeds the row length.
VerbSet predicted_set(const Eigen::Ref<const Eigen::VectorXd>& y_hat, std::size_t k);

// Overlap of one video's annotated set with the equally-sized top-k
// prediction.
struct SetScore {
  std::size_t hits = 0;
  std::size_t size = 0;  // |annotated set|; 0 when the video is excluded
  double value() const {
    return static_cast<double>(hits) / static_cast<double>(size);
  }
};
SetScore score_video(const Eigen::Ref<const Eigen::VectorXd>& y,
                     const Eigen::Ref<const Eigen::VectorXd>& y_hat, double alpha);

struct EvalResult {
  double alpha = 0.0;
  std::size_t n_videos_evaluated = 0;
  double avg_verbs_per_video = 0.0;
  double std_verbs_per_video = 0.0;  // population standard deviation
  double accuracy = 0.0;
  std::map<std::string, double> per_video_scores;
};

// Set-retrieval accuracy at threshold alpha. Videos whose annotated set is
// empty are excluded. Throws InputError("alpha too high for corpus") when no
// video survives.
EvalResult accuracy_probabilistic(const PredictionMatrix& predictions,
                                  const DistributionTable& labels, double alpha);

struct SweepRow {
  double alpha = 0.0;
  std::optional<EvalResult> result;  // empty when no video survives alpha
};

std::vector<double> default_alphas();

// One row per alpha; alphas must be strictly increasing inside (0,1).
std::vector<SweepRow> alpha_sweep(const PredictionMatrix& predictions,
                                  const DistributionTable& labels,
                                  std::span<const double> alphas);

struct PerVerbError {
  VerbIndex verb = 0;
  std::vector<double> per_video_errors;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

// Mean absolute difference |y_i(j) - y_hat_i(j)| per verb, with quartiles.
std::vector<PerVerbError> per_verb_error(const PredictionMatrix& predictions,
                                         const DistributionTable& labels);

// The same summary over squared differences. Not used by default reports.
std::vector<PerVerbError> per_verb_squared_error(const PredictionMatrix& predictions,
                                                 const DistributionTable& labels);

// Checks that predictions and labels list the same videos in the same order
// with the same width. Throws InputError otherwise.
void check_aligned(const PredictionMatrix& predictions,
                   const DistributionTable& labels);

// Reorders `table` to follow `order`; throws InputError for missing ids.
DistributionTable reorder(const DistributionTable& table,
                          std::span<const std::string> order);

}  // namespace verbdist
