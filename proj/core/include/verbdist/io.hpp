#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "verbdist/annotations.hpp"
#include "verbdist/metrics.hpp"
#include "verbdist/model.hpp"
#include "verbdist/synthetic.hpp"

// File formats. Tabular files are tab-separated with a header row so verbs
// may contain spaces. All readers throw InputError with the path (and line
// where it applies) on malformed content.
namespace verbdist::io {

// One verb per line, order significant. Blank lines and trailing '\r' are
// ignored.
VerbVocabulary read_vocabulary(const std::filesystem::path& path);
void write_vocabulary(const std::filesystem::path& path, const VerbVocabulary& vocab);

// JSON lines:
//   {"video_id": "...", "worker_id": "...", "class_label": "...",
//    "dataset_tag": "...", "verbs": ["put", "place"]}
// class_label and dataset_tag are optional.
std::vector<AnnotationRecord> read_records(const std::filesystem::path& path,
                                           const VerbVocabulary& vocab);
void write_records(const std::filesystem::path& path,
                   const std::vector<AnnotationRecord>& records,
                   const VerbVocabulary& vocab);

// Header: video_id class_label dataset_tag annotator_count <verb>...
// Probabilities are written with 6 decimal places.
std::vector<VideoAnnotation> read_aggregated(const std::filesystem::path& path,
                                             const VerbVocabulary& vocab);
void write_aggregated(const std::filesystem::path& path,
                      const std::vector<VideoAnnotation>& videos,
                      const VerbVocabulary& vocab);

// Header: video_id f0 ... f{D-1}. Values round-trip exactly.
DistributionTable read_features(const std::filesystem::path& path);
void write_features(const std::filesystem::path& path, const DistributionTable& features);

// Header: video_id <verb>... Values round-trip exactly.
PredictionMatrix read_predictions(const std::filesystem::path& path,
                                  const VerbVocabulary& vocab);
void write_predictions(const std::filesystem::path& path,
                       const PredictionMatrix& predictions,
                       const VerbVocabulary& vocab);

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelParameters params;
  TrainConfig config;
  std::string vocab_hash;
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Class profiles, centroids and the video -> class assignment.
void write_truth(const std::filesystem::path& path, const SyntheticCorpus& corpus,
                 const VerbVocabulary& vocab);

// Table of annotated distributions built from aggregated videos.
DistributionTable to_table(const std::vector<VideoAnnotation>& videos);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace verbdist::io
