#include "verbdist/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <random>
#include <set>
#include <unordered_map>

#include "verbdist/error.hpp"
#include "verbdist/io.hpp"

namespace verbdist {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Runs `fn`, prefixing any toolkit error with `context` while keeping its
// type (and therefore its exit code).
template <typename Fn>
auto with_context(const std::string& context, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw InputError(context + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

MethodResult evaluate_method(const PredictionMatrix& predictions,
                             const DistributionTable& labels,
                             std::span<const double> alphas) {
  MethodResult r;
  r.classification_accuracy = accuracy_classification(predictions, labels);
  r.sweep = alpha_sweep(predictions, labels, alphas);
  return r;
}

MeanResult mean_of(const std::vector<FoldResult>& folds, bool proposed,
                   std::span<const double> alphas) {
  MeanResult m;
  for (const auto& f : folds) {
    m.classification_accuracy +=
        (proposed ? f.proposed : f.baseline).classification_accuracy;
  }
  m.classification_accuracy /= static_cast<double>(folds.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    MeanSweepRow row;
    row.alpha = alphas[a];
    for (const auto& f : folds) {
      const auto& result = (proposed ? f.proposed : f.baseline).sweep[a].result;
      if (!result) continue;
      row.accuracy += result->accuracy;
      ++row.folds_with_videos;
    }
    if (row.folds_with_videos > 0) row.accuracy /= row.folds_with_videos;
    m.sweep.push_back(row);
  }
  return m;
}

}  // namespace

std::vector<std::string> FoldAssignment::videos_in(int fold) const {
  std::vector<std::string> out;
  for (const auto& [video, f] : fold_of) {
    if (f == fold) out.push_back(video);
  }
  return out;
}

FoldAssignment make_folds(std::span<const VideoClass> videos, int n_folds,
                          std::uint64_t seed) {
  if (n_folds < 2) throw ConfigError("need at least 2 folds");
  if (static_cast<std::size_t>(n_folds) > videos.size()) {
    throw ConfigError("number of folds (" + std::to_string(n_folds) +
                      ") exceeds number of videos (" + std::to_string(videos.size()) +
                      ")");
  }
  std::map<std::string, std::vector<std::string>> by_class;
  std::set<std::string> seen;
  for (const auto& v : videos) {
    if (!seen.insert(v.video_id).second) {
      throw InputError("duplicate video id '" + v.video_id + "' in fold input");
    }
    by_class[v.class_label].push_back(v.video_id);
  }

  FoldAssignment folds;
  folds.n_folds = n_folds;
  std::mt19937_64 rng(seed);
  int next = 0;
  for (auto& [label, ids] : by_class) {
    std::sort(ids.begin(), ids.end());
    std::shuffle(ids.begin(), ids.end(), rng);
    for (const auto& id : ids) {
      folds.fold_of.emplace(id, next);
      next = (next + 1) % n_folds;
    }
  }
  return folds;
}

ExperimentConfig::ExperimentConfig() {
  proposed.loss = LossKind::kEuclidean;
  baseline.loss = LossKind::kLogisticOneHot;
}

void validate(const ExperimentConfig& config) {
  if (config.n_folds < 2) throw ConfigError("need at least 2 folds");
  if (config.top_k_pairs <= 0) throw ConfigError("top-k pair count must be positive");
  if (!(config.cooccurrence_alpha > 0.0 && config.cooccurrence_alpha < 1.0)) {
    throw ConfigError("co-occurrence alpha must lie inside (0,1)");
  }
  if (config.alphas.empty()) throw ConfigError("alpha list is empty");
  for (std::size_t i = 0; i < config.alphas.size(); ++i) {
    if (!(config.alphas[i] > 0.0 && config.alphas[i] < 1.0)) {
      throw ConfigError("alphas must lie inside (0,1)");
    }
    if (i > 0 && !(config.alphas[i] > config.alphas[i - 1])) {
      throw ConfigError("alpha list must be strictly increasing");
    }
  }
  if (config.proposed.loss != LossKind::kEuclidean) {
    throw ConfigError("the proposed model must use the euclidean loss");
  }
  if (config.baseline.loss != LossKind::kLogisticOneHot) {
    throw ConfigError("the baseline model must use the logistic-onehot loss");
  }
  validate(config.proposed);
  validate(config.baseline);
}

AnnotationStatistics annotation_statistics(std::span<const AnnotationRecord> records,
                                           std::size_t vocab_size, int top_k) {
  AnnotationStatistics stats;
  stats.verbs_per_annotator = verbs_per_annotator(records);
  stats.unique_verbs = unique_verbs_per_class(records);
  stats.verb_counts = verb_counts(records, vocab_size);

  std::map<std::string, std::vector<VerbSet>> by_tag;
  for (const auto& r : records) by_tag[r.dataset_tag].push_back(r.verbs_selected);
  std::vector<CooccurrenceMatrix> matrices;
  for (const auto& [tag, sets] : by_tag) {
    stats.dataset_tags.push_back(tag);
    matrices.push_back(cooccurrence_counts(std::span<const VerbSet>(sets), vocab_size, tag));
  }
  stats.top_pairs = top_symmetric_pairs(matrices, top_k);
  return stats;
}

ExperimentReport run_experiment(const VerbVocabulary& vocab,
                                std::span<const AnnotationRecord> records,
                                const DistributionTable& features,
                                const ExperimentConfig& config) {
  validate(config);
  ExperimentReport report;
  report.started_at = utc_now();
  report.config = config;
  report.verbs = vocab.verbs();
  report.vocab_hash = vocab.hash();

  const auto videos = with_context("aggregation", [&] { return aggregate(records, vocab); });
  report.n_videos = videos.size();
  report.labels = io::to_table(videos);

  std::unordered_map<std::string, Eigen::Index> feature_row;
  for (std::size_t i = 0; i < features.video_ids.size(); ++i) {
    feature_row.emplace(features.video_ids[i], static_cast<Eigen::Index>(i));
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(videos.size()), features.values.cols());
  Eigen::MatrixXd y_proposed = report.labels.values;
  Eigen::MatrixXd y_baseline = Eigen::MatrixXd::Zero(y_proposed.rows(), y_proposed.cols());
  std::vector<VideoClass> strata;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const auto it = feature_row.find(videos[i].video_id);
    if (it == feature_row.end()) {
      throw InputError("no feature row for annotated video '" + videos[i].video_id + "'");
    }
    const auto row = static_cast<Eigen::Index>(i);
    x.row(row) = features.values.row(it->second);
    y_baseline(row, static_cast<Eigen::Index>(majority_vote(videos[i]))) = 1.0;
    strata.push_back({videos[i].video_id, videos[i].class_label});
  }

  const FoldAssignment folds = with_context(
      "fold assignment", [&] { return make_folds(strata, config.n_folds, config.seed); });

  report.proposed_predictions = {report.labels.video_ids,
                                 Eigen::MatrixXd::Zero(y_proposed.rows(), y_proposed.cols())};
  report.baseline_predictions = report.proposed_predictions;

  for (int fold = 0; fold < config.n_folds; ++fold) {
    const std::string ctx = "fold " + std::to_string(fold);
    std::vector<Eigen::Index> train_rows, test_rows;
    for (std::size_t i = 0; i < videos.size(); ++i) {
      const bool held_out = folds.fold_of.at(videos[i].video_id) == fold;
      (held_out ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(i));
    }
    FoldResult fr;
    fr.fold = fold;
    fr.n_train = train_rows.size();
    fr.n_test = test_rows.size();
    if (test_rows.empty() || train_rows.empty()) {
      throw ConfigError(ctx + ": empty train or test split");
    }

    const Eigen::MatrixXd x_train = gather_rows(x, train_rows);
    const Eigen::MatrixXd x_test = gather_rows(x, test_rows);

    TrainConfig proposed_cfg = config.proposed;
    proposed_cfg.seed = config.seed + static_cast<std::uint64_t>(fold);
    TrainConfig baseline_cfg = config.baseline;
    baseline_cfg.seed = config.seed + static_cast<std::uint64_t>(fold);

    const TrainResult proposed = with_context(ctx + ", training proposed", [&] {
      return train(x_train, gather_rows(y_proposed, train_rows), proposed_cfg);
    });
    const TrainResult baseline = with_context(ctx + ", training baseline", [&] {
      return train(x_train, gather_rows(y_baseline, train_rows), baseline_cfg);
    });
    fr.proposed_loss = proposed.epoch_loss;
    fr.baseline_loss = baseline.epoch_loss;

    DistributionTable test_labels;
    for (auto r : test_rows) {
      test_labels.video_ids.push_back(report.labels.video_ids[static_cast<std::size_t>(r)]);
    }
    test_labels.values = gather_rows(report.labels.values, test_rows);
    const PredictionMatrix proposed_pred{test_labels.video_ids,
                                         predict_matrix(proposed.params, x_test)};
    const PredictionMatrix baseline_pred{test_labels.video_ids,
                                         predict_matrix(baseline.params, x_test)};
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      const auto src = static_cast<Eigen::Index>(i);
      report.proposed_predictions.values.row(test_rows[i]) = proposed_pred.values.row(src);
      report.baseline_predictions.values.row(test_rows[i]) = baseline_pred.values.row(src);
    }
    with_context(ctx + ", evaluation", [&] {
      fr.proposed = evaluate_method(proposed_pred, test_labels, config.alphas);
      fr.baseline = evaluate_method(baseline_pred, test_labels, config.alphas);
    });
    report.folds.push_back(std::move(fr));
  }

  report.proposed_mean = mean_of(report.folds, true, config.alphas);
  report.baseline_mean = mean_of(report.folds, false, config.alphas);

  with_context("pooled evaluation", [&] {
    report.proposed_pooled =
        evaluate_method(report.proposed_predictions, report.labels, config.alphas);
    report.baseline_pooled =
        evaluate_method(report.baseline_predictions, report.labels, config.alphas);
    report.proposed_verb_error = per_verb_error(report.proposed_predictions, report.labels);
    report.baseline_verb_error = per_verb_error(report.baseline_predictions, report.labels);
  });

  with_context("co-occurrence analysis", [&] {
    std::map<std::string, std::vector<Eigen::Index>> rows_by_tag;
    for (std::size_t i = 0; i < videos.size(); ++i) {
      rows_by_tag[videos[i].dataset_tag].push_back(static_cast<Eigen::Index>(i));
    }
    std::vector<CooccurrenceMatrix> matrices;
    for (const auto& [tag, rows] : rows_by_tag) {
      report.dataset_tags.push_back(tag);
      const auto sets = binarize(gather_rows(report.proposed_predictions.values, rows),
                                 config.cooccurrence_alpha);
      matrices.push_back(cooccurrence_counts(std::span<const VerbSet>(sets), vocab.size(), tag));
    }
    report.predicted_top_pairs = top_symmetric_pairs(matrices, config.top_k_pairs);
    report.annotation_stats = annotation_statistics(records, vocab.size(), config.top_k_pairs);
  });

  // Correlation between annotated-set size and per-video score at 0.5.
  {
    std::vector<double> sizes, scores;
    for (Eigen::Index i = 0; i < report.labels.values.rows(); ++i) {
      const SetScore s = score_video(report.labels.values.row(i).transpose(),
                                     report.proposed_predictions.values.row(i).transpose(),
                                     0.5);
      if (s.size == 0) continue;
      sizes.push_back(static_cast<double>(s.size));
      scores.push_back(s.value());
    }
    try {
      report.size_score_correlation =
          r_squared(sizes, scores, "annotated_verbs_at_0.5", "proposed_score_at_0.5");
    } catch (const InputError&) {
      report.size_score_correlation.reset();
    }
  }

  report.finished_at = utc_now();
  return report;
}

ExperimentReport run_experiment(const std::filesystem::path& vocab_path,
                                const std::filesystem::path& records_path,
                                const std::filesystem::path& features_path,
                                const ExperimentConfig& config) {
  const VerbVocabulary vocab = io::read_vocabulary(vocab_path);
  const auto records = io::read_records(records_path, vocab);
  const auto features = io::read_features(features_path);
  return run_experiment(vocab, records, features, config);
}

VerbVocabulary benchmark_vocabulary() {
  // Adjacent entries (2m, 2m+1) are near-synonyms; the synthetic generator
  // relies on that pairing.
  return VerbVocabulary({
      "put",       "place",     "take",      "grab",      "pick up",   "lift",
      "open",      "unscrew",   "close",     "screw",     "pour",      "fill",
      "stir",      "mix",       "cut",       "slice",     "press",     "push",
      "pull",      "pull out",  "turn on",   "rotate",    "turn off",  "switch",
      "wash",      "rinse",     "crack",     "break",     "scoop",     "spoon",
      "squeeze",   "compress",  "hold",      "grasp",     "move",      "carry",
      "insert",    "put in",    "remove",    "take out",  "shake",     "jiggle",
      "spread",    "smear",     "wipe",      "clean",     "peel",      "skin",
      "dip",       "dunk",      "flip",      "turn over", "fold",      "bend",
      "check",     "look",      "kick",      "nudge",     "tilt",      "tip",
      "drain",     "empty",     "weigh",     "measure",   "set down",  "drop",
      "tap",       "touch",     "grate",     "shred",     "sprinkle",  "season",
      "roll",      "knead",     "beat",      "whisk",     "tear",      "rip",
      "adjust",    "position",  "release",   "let go",    "slide",     "drag",
      "cover",     "wrap",      "store",     "stack",     "hang",      "reach",
  });
}

SynthConfig benchmark_synth_config() {
  SynthConfig c;
  c.n_classes = 20;
  c.n_videos = 600;
  c.workers_min = 30;
  c.workers_max = 50;
  c.feature_dim = 32;
  c.feature_noise_sigma = 1.0;
  c.profile_sparsity = 5;
  c.seed = 2017;
  c.dataset_tag = "synthetic";
  return c;
}

ExperimentConfig benchmark_experiment_config() {
  ExperimentConfig c;
  c.n_folds = 5;
  c.seed = 2017;
  for (TrainConfig* t : {&c.proposed, &c.baseline}) {
    t->architecture = Architecture::kOneHidden;
    t->hidden_units = 64;
    t->epochs = 60;
    t->batch_size = 16;
    t->momentum = 0.9;
    t->weight_decay = 0.0005;
    t->lr_step_epochs = {40};
  }
  c.proposed.loss = LossKind::kEuclidean;
  c.proposed.learning_rate = 0.01;
  // Per-entry cross-entropy gradients are 1/|verbs| the size of the
  // Euclidean ones, hence the larger step.
  c.baseline.loss = LossKind::kLogisticOneHot;
  c.baseline.learning_rate = 0.5;
  return c;
}

}  // namespace verbdist
