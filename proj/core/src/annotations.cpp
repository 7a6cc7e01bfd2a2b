#include "verbdist/annotations.hpp"

#include <map>
#include <unordered_set>

#include "verbdist/error.hpp"

namespace verbdist {

std::vector<VideoAnnotation> aggregate(std::span<const AnnotationRecord> records,
                                       const VerbVocabulary& vocab) {
  if (records.empty()) throw InputError("no annotations");

  struct Tally {
    const AnnotationRecord* first = nullptr;
    std::unordered_set<std::string> workers;
    std::vector<int> counts;
  };
  std::map<std::string, Tally> by_video;

  for (const auto& record : records) {
    if (record.verbs_selected.empty()) {
      throw InputError("empty verb selection for video '" + record.video_id +
                       "', worker '" + record.worker_id + "'");
    }
    Tally& tally = by_video[record.video_id];
    if (tally.first == nullptr) {
      tally.counts.assign(vocab.size(), 0);
    }
    // Metadata comes from the lexicographically smallest worker so that it
    // does not depend on record order when workers disagree.
    if (tally.first == nullptr || record.worker_id < tally.first->worker_id) {
      tally.first = &record;
    }
    if (!tally.workers.insert(record.worker_id).second) {
      throw InputError("duplicate annotation for (video '" + record.video_id +
                       "', worker '" + record.worker_id + "')");
    }
    for (VerbIndex j : record.verbs_selected) {
      if (j >= vocab.size()) {
        throw InputError("verb index " + std::to_string(j) +
                         " outside vocabulary of size " +
                         std::to_string(vocab.size()) + " in video '" +
                         record.video_id + "'");
      }
      ++tally.counts[j];
    }
  }

  std::vector<VideoAnnotation> out;
  out.reserve(by_video.size());
  for (auto& [video_id, tally] : by_video) {
    VideoAnnotation va;
    va.video_id = video_id;
    const AnnotationRecord* meta = tally.first;
    va.class_label = meta->class_label;
    va.dataset_tag = meta->dataset_tag;
    va.annotator_count = static_cast<int>(tally.workers.size());
    va.distribution.resize(static_cast<Eigen::Index>(vocab.size()));
    for (VerbIndex j = 0; j < vocab.size(); ++j) {
      va.distribution[static_cast<Eigen::Index>(j)] =
          static_cast<double>(tally.counts[j]) / va.annotator_count;
    }
    out.push_back(std::move(va));
  }
  return out;
}

VerbIndex majority_vote(const LabelDistribution& distribution) {
  Eigen::Index best = -1;
  double best_value = 0.0;
  for (Eigen::Index j = 0; j < distribution.size(); ++j) {
    if (distribution[j] > best_value) {
      best_value = distribution[j];
      best = j;
    }
  }
  if (best < 0) throw InputError("no annotated verbs");
  return static_cast<VerbIndex>(best);
}

LabelDistribution to_one_hot(VerbIndex index, std::size_t vocab_size) {
  if (index >= vocab_size) {
    throw InputError("verb index " + std::to_string(index) +
                     " outside vocabulary of size " +
                     std::to_string(vocab_size));
  }
  LabelDistribution p = LabelDistribution::Zero(static_cast<Eigen::Index>(vocab_size));
  p[static_cast<Eigen::Index>(index)] = 1.0;
  return p;
}

}  // namespace verbdist
