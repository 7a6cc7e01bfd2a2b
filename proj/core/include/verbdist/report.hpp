#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "verbdist/metrics.hpp"
#include "verbdist/pipeline.hpp"
#include "verbdist/statistics.hpp"

namespace verbdist::report {

inline constexpr int kReportVersion = 1;

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const MethodResult& result);
nlohmann::json to_json(std::span<const PerVerbError> errors,
                       const std::vector<std::string>& verbs);

// Structured report. Excludes timestamps so identical runs serialize to
// identical bytes.
nlohmann::json to_json(const ExperimentReport& report);

// Writes the structured report (report.json) plus human-readable tables:
//   table1.txt                  classification vs proposed summary
//   table2.txt / table2.tsv     alpha sweep for both methods
//   per_verb_error.tsv          per-verb absolute error summaries
//   predicted_cooccurrence.tsv  top predicted symmetric pairs
//   annotation_stats.tsv        verbs per annotator and unique verbs per class
//   annotation_cooccurrence.tsv top annotated symmetric pairs
//   verb_counts.tsv
// Rendering uses only the JSON document, so `report.json` can be re-rendered.
void emit_reports(const nlohmann::json& report, const std::filesystem::path& out_dir);

// As above, plus run_meta.json with timestamps.
void emit_reports(const ExperimentReport& report, const std::filesystem::path& out_dir);

std::string render_table1(const nlohmann::json& report);
std::string render_table2(const nlohmann::json& report);

// Rows (verb_i, verb_j, C, N_ij, N_ji, S, dataset_tag) for every pair i < j
// with a non-zero count.
std::string cooccurrence_tsv(const CooccurrenceMatrix& matrix,
                             const std::vector<std::string>& verbs);

std::string top_pairs_tsv(std::span<const SymmetricPair> pairs,
                          const std::vector<std::string>& verbs,
                          const std::vector<std::string>& dataset_tags);

std::string class_summary_tsv(const AnnotationStatistics& stats);

// Evaluation of a prediction file against annotated labels: argmax
// accuracy, alpha sweep and per-verb error.
nlohmann::json evaluation_json(const PredictionMatrix& predictions,
                               const DistributionTable& labels,
                               std::span<const double> alphas,
                               const std::vector<std::string>& verbs);
std::string render_sweep(const nlohmann::json& method_result);

}  // namespace verbdist::report
