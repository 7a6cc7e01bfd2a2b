#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "verbdist/annotations.hpp"

namespace verbdist {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Pairwise co-selection statistics over one corpus.
//   counts(i,j)  number of selections containing both verb i and verb j, i != j
//   row_normalized(i,j) = counts(i,j) / sum_k counts(i,k), 0 for empty rows
//   symmetric(i,j) = (row_normalized(i,j) + row_normalized(j,i)) / 2
// The diagonal of `counts` is always zero.
struct CooccurrenceMatrix {
  CountMatrix counts;
  Eigen::MatrixXd row_normalized;
  Eigen::MatrixXd symmetric;
  std::string dataset_tag;

  std::size_t size() const { return static_cast<std::size_t>(counts.rows()); }
};

// One verb set per annotation source: a worker's selection or a video's
// binarized prediction.
using VerbSet = std::set<VerbIndex>;

CooccurrenceMatrix cooccurrence_counts(std::span<const VerbSet> sources,
                                       std::size_t vocab_size,
                                       std::string dataset_tag = {});

// Each record contributes one selection.
CooccurrenceMatrix cooccurrence_counts(std::span<const AnnotationRecord> records,
                                       std::size_t vocab_size,
                                       std::string dataset_tag = {});

// Verbs with value > alpha in each row.
std::vector<VerbSet> binarize(const Eigen::MatrixXd& values, double alpha);

struct SymmetricPair {
  VerbIndex i = 0;
  VerbIndex j = 0;
  std::vector<double> per_dataset;  // in the order the matrices were given
  double combined = 0.0;
};

// Ranks unordered pairs i < j with positive combined symmetric co-occurrence
// by the sum over datasets, descending; ties by (i, j). Returns at most k.
std::vector<SymmetricPair> top_symmetric_pairs(
    std::span<const CooccurrenceMatrix> matrices, int k);

struct Summary {
  std::size_t n = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

// Five-number summary plus mean. Quartiles use linear interpolation between
// order statistics. Throws InputError on empty input.
Summary summarize(std::span<const double> values);

// Verbs-per-annotator summary for every class label in `records`.
std::map<std::string, Summary> verbs_per_annotator(
    std::span<const AnnotationRecord> records);

// Number of distinct verbs selected by anyone, per class label.
std::map<std::string, std::size_t> unique_verbs_per_class(
    std::span<const AnnotationRecord> records);

// Number of records selecting each verb.
std::vector<std::int64_t> verb_counts(std::span<const AnnotationRecord> records,
                                      std::size_t vocab_size);

struct CorrelationReport {
  std::string x_name;
  std::string y_name;
  double r_squared = 0.0;
  std::size_t n = 0;
};

// Squared Pearson correlation. Throws InputError on length mismatch or fewer
// than two samples, and on zero variance in either input.
CorrelationReport r_squared(std::span<const double> x, std::span<const double> y,
                            std::string x_name = "x", std::string y_name = "y");

}  // namespace verbdist
