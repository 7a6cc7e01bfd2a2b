#include "verbdist/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>

#include "verbdist/error.hpp"

namespace verbdist {

namespace {

std::string numbered(const char* prefix, int value, int width) {
  std::string digits_str = std::to_string(value);
  if (static_cast<int>(digits_str.size()) < width) {
    digits_str.insert(0, static_cast<std::size_t>(width) - digits_str.size(), '0');
  }
  return prefix + digits_str;
}

int digits(int n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

LabelDistribution draw_profile(const SynthConfig& config, std::size_t vocab_size,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<VerbIndex> pick(0, vocab_size - 1);
  LabelDistribution profile = LabelDistribution::Zero(static_cast<Eigen::Index>(vocab_size));

  std::vector<VerbIndex> core;
  const auto target = static_cast<std::size_t>(config.profile_sparsity);
  while (core.size() < target) {
    const VerbIndex v = pick(rng);
    if (std::find(core.begin(), core.end(), v) != core.end()) continue;
    const double p = core.empty() ? 0.55 + 0.40 * unit(rng)
                                  : 0.15 + 0.70 * unit(rng);
    profile[static_cast<Eigen::Index>(v)] = p;
    core.push_back(v);
    const VerbIndex partner = v ^ 1U;
    if (core.size() < target && partner < vocab_size &&
        std::find(core.begin(), core.end(), partner) == core.end() &&
        unit(rng) < 0.5) {
      profile[static_cast<Eigen::Index>(partner)] =
          std::min(p * (0.6 + 0.4 * unit(rng)), 0.95);
      core.push_back(partner);
    }
  }
  for (Eigen::Index j = 0; j < profile.size(); ++j) {
    if (profile[j] == 0.0 && unit(rng) < 0.15) {
      profile[j] = 0.01 + 0.07 * unit(rng);
    }
  }
  return profile;
}

}  // namespace

void validate(const SynthConfig& config) {
  if (config.n_classes <= 0 || config.n_videos <= 0 || config.feature_dim <= 0 ||
      config.profile_sparsity <= 0) {
    throw ConfigError("synthetic corpus sizes must be positive");
  }
  if (config.workers_min < 1 || config.workers_max < config.workers_min) {
    throw ConfigError("worker range must satisfy 1 <= min <= max");
  }
  if (!(config.feature_noise_sigma >= 0.0)) {
    throw ConfigError("feature noise sigma must be non-negative");
  }
}

SyntheticCorpus generate(const SynthConfig& config, const VerbVocabulary& vocab) {
  validate(config);
  if (vocab.size() < static_cast<std::size_t>(config.profile_sparsity)) {
    throw ConfigError("vocabulary of " + std::to_string(vocab.size()) +
                      " verbs is smaller than profile sparsity " +
                      std::to_string(config.profile_sparsity));
  }
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<LatentClass> classes;
  const int width = digits(config.n_classes - 1);
  for (int c = 0; c < config.n_classes; ++c) {
    LatentClass lc;
    lc.class_id = numbered("class_", c, width);
    lc.profile = draw_profile(config, vocab.size(), rng);
    lc.feature_centroid.resize(config.feature_dim);
    for (auto& x : lc.feature_centroid) x = normal(rng);
    classes.push_back(std::move(lc));
  }
  return generate(config, vocab, std::move(classes));
}

SyntheticCorpus generate(const SynthConfig& config, const VerbVocabulary& vocab,
                         std::vector<LatentClass> classes) {
  validate(config);
  if (classes.empty()) throw ConfigError("no latent classes given");
  for (const auto& lc : classes) {
    if (lc.profile.size() != static_cast<Eigen::Index>(vocab.size())) {
      throw InputError("profile of class '" + lc.class_id +
                       "' does not match vocabulary size");
    }
    if ((lc.profile.array() < 0.0).any() || (lc.profile.array() > 1.0).any()) {
      throw InputError("profile of class '" + lc.class_id + "' leaves [0,1]");
    }
    if (lc.profile.maxCoeff() < 0.5) {
      throw InputError("class '" + lc.class_id + "' has no verb with p >= 0.5");
    }
    if (lc.feature_centroid.size() != config.feature_dim) {
      throw InputError("centroid of class '" + lc.class_id +
                       "' does not match feature_dim");
    }
  }

  // Separate stream from profile drawing so corpora for fixed classes do not
  // depend on how the classes were produced.
  std::mt19937_64 rng(config.seed * 0x2545f4914f6cdd1dULL + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> worker_count(config.workers_min,
                                                  config.workers_max);
  const int pool_size = std::max(config.workers_max * 4, 200);
  std::vector<int> pool(static_cast<std::size_t>(pool_size));
  std::iota(pool.begin(), pool.end(), 0);

  SyntheticCorpus corpus;
  corpus.classes = std::move(classes);
  corpus.features.values.resize(config.n_videos, config.feature_dim);
  const int video_width = digits(config.n_videos - 1);
  const int worker_width = digits(pool_size - 1);
  const auto vocab_size = static_cast<Eigen::Index>(vocab.size());

  for (int v = 0; v < config.n_videos; ++v) {
    const std::size_t c = static_cast<std::size_t>(v) % corpus.classes.size();
    const LatentClass& lc = corpus.classes[c];
    const std::string video_id = numbered("vid_", v, video_width);
    corpus.features.video_ids.push_back(video_id);
    corpus.video_class.push_back(c);
    for (int d = 0; d < config.feature_dim; ++d) {
      corpus.features.values(v, d) =
          lc.feature_centroid[d] + config.feature_noise_sigma * normal(rng);
    }

    const int n_workers = worker_count(rng);
    // Partial Fisher-Yates: the first n_workers pool entries become this
    // video's workers.
    for (int w = 0; w < n_workers; ++w) {
      std::uniform_int_distribution<int> swap_with(w, pool_size - 1);
      std::swap(pool[static_cast<std::size_t>(w)],
                pool[static_cast<std::size_t>(swap_with(rng))]);
    }
    for (int w = 0; w < n_workers; ++w) {
      AnnotationRecord record;
      record.video_id = video_id;
      record.worker_id = numbered("w", pool[static_cast<std::size_t>(w)], worker_width);
      record.class_label = lc.class_id;
      record.dataset_tag = config.dataset_tag;
      while (record.verbs_selected.empty()) {
        for (Eigen::Index j = 0; j < vocab_size; ++j) {
          if (unit(rng) < lc.profile[j]) {
            record.verbs_selected.insert(static_cast<VerbIndex>(j));
          }
        }
      }
      corpus.records.push_back(std::move(record));
    }
  }
  return corpus;
}

Eigen::MatrixXd truth_deviation(std::span<const VideoAnnotation> aggregated,
                                const SyntheticCorpus& corpus) {
  std::unordered_map<std::string, std::size_t> class_of;
  for (std::size_t i = 0; i < corpus.features.video_ids.size(); ++i) {
    class_of.emplace(corpus.features.video_ids[i], corpus.video_class[i]);
  }
  const Eigen::Index cols =
      corpus.classes.empty() ? 0 : corpus.classes.front().profile.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(aggregated.size()), cols);
  for (std::size_t i = 0; i < aggregated.size(); ++i) {
    auto it = class_of.find(aggregated[i].video_id);
    if (it == class_of.end()) {
      throw InputError("video '" + aggregated[i].video_id +
                       "' is not part of the synthetic corpus");
    }
    const LabelDistribution& profile = corpus.classes[it->second].profile;
    if (aggregated[i].distribution.size() != cols) {
      throw InputError("aggregated distribution width does not match profile");
    }
    out.row(static_cast<Eigen::Index>(i)) =
        (aggregated[i].distribution - profile).cwiseAbs().transpose();
  }
  return out;
}

std::vector<double> truth_gap(std::span<const VideoAnnotation> aggregated,
                              const SyntheticCorpus& corpus) {
  const Eigen::MatrixXd dev = truth_deviation(aggregated, corpus);
  std::vector<double> out(static_cast<std::size_t>(dev.cols()), 0.0);
  for (Eigen::Index j = 0; j < dev.cols(); ++j) {
    if (dev.rows() > 0) out[static_cast<std::size_t>(j)] = dev.col(j).maxCoeff();
  }
  return out;
}

}  // namespace verbdist
