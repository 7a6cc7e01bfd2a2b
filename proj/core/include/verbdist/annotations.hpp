#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "verbdist/vocabulary.hpp"

namespace verbdist {

// Per-verb annotation probabilities for one video. Entries lie in [0,1] and
// are not normalised to sum to one.
using LabelDistribution = Eigen::VectorXd;

// One worker's verb selections for one video.
struct AnnotationRecord {
  std::string video_id;
  std::string worker_id;
  std::string class_label;
  std::string dataset_tag;
  std::set<VerbIndex> verbs_selected;
};

struct VideoAnnotation {
  std::string video_id;
  std::string class_label;
  std::string dataset_tag;
  int annotator_count = 0;
  LabelDistribution distribution;
};

// Aggregates records into one distribution per video: p(j) is the fraction of
// the video's distinct workers that selected verb j. Videos are returned
// sorted by video id, so the result does not depend on record order.
//
// Throws InputError on an empty collection, an empty selection, an index
// outside the vocabulary, or a repeated (video, worker) pair.
std::vector<VideoAnnotation> aggregate(std::span<const AnnotationRecord> records,
                                       const VerbVocabulary& vocab);

// Index of the largest probability; ties go to the lowest index. Throws
// InputError when no entry is positive.
VerbIndex majority_vote(const LabelDistribution& distribution);
inline VerbIndex majority_vote(const VideoAnnotation& annotation) {
  return majority_vote(annotation.distribution);
}

LabelDistribution to_one_hot(VerbIndex index, std::size_t vocab_size);
inline LabelDistribution to_one_hot(VerbIndex index,
                                    const VerbVocabulary& vocab) {
  return to_one_hot(index, vocab.size());
}

}  // namespace verbdist
