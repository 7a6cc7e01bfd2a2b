#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "verbdist/annotations.hpp"
#include "verbdist/error.hpp"
#include "verbdist/io.hpp"
#include "verbdist/metrics.hpp"
#include "verbdist/model.hpp"
#include "verbdist/pipeline.hpp"
#include "verbdist/report.hpp"
#include "verbdist/statistics.hpp"
#include "verbdist/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace verbdist;

namespace {

// "start:stop:step" (inclusive) or a comma separated list.
std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + s + "' in --alpha");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("--alpha range must be start:stop:step");
    const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw ConfigError("--alpha range is empty");
    const auto n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
    for (int i = 0; i <= n; ++i) {
      // Snap to 1e-9 so 0.1:0.9:0.1 yields 0.3 rather than 0.30000000000000004.
      out.push_back(std::round((start + i * step) * 1e9) / 1e9);
    }
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  }
  if (out.empty()) throw ConfigError("--alpha list is empty");
  return out;
}

struct TrainFlags {
  std::string loss = "euclidean";
  double lr = 1e-3;
  int epochs = 10;
  int batch_size = 128;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  std::string arch = "linear";
  int hidden = 0;
  std::vector<int> lr_steps;
  std::uint64_t seed = 0;

  CLI::Option* lr_opt = nullptr;
  std::vector<CLI::Option*> overrides;

  void add_to(CLI::App* app, bool with_loss) {
    if (with_loss) {
      app->add_option("--loss", loss, "euclidean | logistic-onehot")
          ->check(CLI::IsMember({"euclidean", "logistic-onehot", "logistic_onehot"}));
    }
    lr_opt = app->add_option("--lr", lr, "Learning rate");
    overrides = {
        lr_opt,
        app->add_option("--epochs", epochs, "Training epochs"),
        app->add_option("--batch-size", batch_size, "Mini-batch size"),
        app->add_option("--momentum", momentum, "SGD momentum"),
        app->add_option("--weight-decay", weight_decay, "L2 weight decay"),
        app->add_option("--arch", arch, "linear | one-hidden")
            ->check(CLI::IsMember({"linear", "one-hidden"})),
        app->add_option("--hidden", hidden, "Hidden units for one-hidden"),
        app->add_option("--lr-step", lr_steps, "Epochs at which lr drops 10x")
            ->delimiter(','),
    };
  }

  TrainConfig config() const {
    TrainConfig c;
    c.loss = parse_loss(loss);
    apply(c);
    return c;
  }

  // Copies every flag the user set onto `c`; unset flags keep c's values.
  void apply(TrainConfig& c) const {
    if (overrides[0]->count()) c.learning_rate = lr;
    if (overrides[1]->count()) c.epochs = epochs;
    if (overrides[2]->count()) c.batch_size = batch_size;
    if (overrides[3]->count()) c.momentum = momentum;
    if (overrides[4]->count()) c.weight_decay = weight_decay;
    if (overrides[5]->count()) c.architecture = parse_architecture(arch);
    if (overrides[6]->count()) c.hidden_units = hidden;
    if (overrides[7]->count()) c.lr_step_epochs = lr_steps;
  }
};

VerbVocabulary load_vocab(const std::string& path) {
  if (path.empty()) throw ConfigError("--vocab is required");
  return io::read_vocabulary(path);
}

DistributionTable load_labels(const std::string& records_path, const std::string& labels_path,
                              const VerbVocabulary& vocab) {
  if (!labels_path.empty()) return io::to_table(io::read_aggregated(labels_path, vocab));
  if (!records_path.empty()) {
    return io::to_table(aggregate(io::read_records(records_path, vocab), vocab));
  }
  throw ConfigError("either --records or --labels is required");
}

void print_sweep(const std::string& name, const json& method) {
  std::cout << name << " (classification accuracy "
            << method.at("classification_accuracy").get<double>() << ")\n"
            << report::render_sweep(method);
}

int run_aggregate(const std::string& vocab_path, const std::string& records, const fs::path& out) {
  const auto vocab = load_vocab(vocab_path);
  const auto videos = aggregate(io::read_records(records, vocab), vocab);
  io::write_aggregated(out / "aggregated.tsv", videos, vocab);
  std::cout << "aggregated " << videos.size() << " videos -> " << (out / "aggregated.tsv").string()
            << "\n";
  return 0;
}

int run_stats(const std::string& vocab_path, const std::string& records_path, int top_k,
              const fs::path& out) {
  const auto vocab = load_vocab(vocab_path);
  const auto records = io::read_records(records_path, vocab);
  const auto stats = annotation_statistics(records, vocab.size(), top_k);

  io::write_text(out / "annotation_stats.tsv", report::class_summary_tsv(stats));
  std::ostringstream counts;
  counts << "verb\tcount\n";
  for (std::size_t j = 0; j < vocab.size(); ++j) {
    counts << vocab.at(j) << '\t' << stats.verb_counts[j] << '\n';
  }
  io::write_text(out / "verb_counts.tsv", counts.str());
  io::write_text(out / "annotation_cooccurrence.tsv",
                 report::top_pairs_tsv(stats.top_pairs, vocab.verbs(), stats.dataset_tags));

  std::map<std::string, std::vector<AnnotationRecord>> by_tag;
  for (const auto& r : records) by_tag[r.dataset_tag].push_back(r);
  std::ostringstream full;
  bool first = true;
  for (const auto& [tag, rs] : by_tag) {
    const auto m = cooccurrence_counts(std::span<const AnnotationRecord>(rs), vocab.size(), tag);
    std::string block = report::cooccurrence_tsv(m, vocab.verbs());
    if (!first) block = block.substr(block.find('\n') + 1);  // single header
    full << block;
    first = false;
  }
  io::write_text(out / "cooccurrence.tsv", full.str());

  std::cout << report::class_summary_tsv(stats) << "\ntop pairs:\n"
            << report::top_pairs_tsv(stats.top_pairs, vocab.verbs(), stats.dataset_tags);
  return 0;
}

struct SynthFlags {
  std::string preset;
  int classes = 0, videos = 0, workers_min = 0, workers_max = 0, dim = 0, sparsity = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::vector<CLI::Option*> opts;

  void add_to(CLI::App* app) {
    app->add_option("--preset", preset, "Start from a named configuration")
        ->check(CLI::IsMember({"benchmark"}));
    opts = {app->add_option("--classes", classes, "Latent classes"),
            app->add_option("--videos", videos, "Videos"),
            app->add_option("--workers-min", workers_min, "Fewest workers per video"),
            app->add_option("--workers-max", workers_max, "Most workers per video"),
            app->add_option("--dim", dim, "Feature dimension"),
            app->add_option("--sparsity", sparsity, "Dominant verbs per class"),
            app->add_option("--noise", noise, "Feature noise sigma"),
            app->add_option("--seed", seed, "Random seed")};
  }

  SynthConfig config() const {
    SynthConfig c = preset == "benchmark" ? benchmark_synth_config() : SynthConfig{};
    if (opts[0]->count()) c.n_classes = classes;
    if (opts[1]->count()) c.n_videos = videos;
    if (opts[2]->count()) c.workers_min = workers_min;
    if (opts[3]->count()) c.workers_max = workers_max;
    if (opts[4]->count()) c.feature_dim = dim;
    if (opts[5]->count()) c.profile_sparsity = sparsity;
    if (opts[6]->count()) c.feature_noise_sigma = noise;
    if (opts[7]->count()) c.seed = seed;
    return c;
  }
};

int run_synth(const SynthFlags& flags, const std::string& vocab_path, const fs::path& out) {
  const VerbVocabulary vocab =
      vocab_path.empty() ? benchmark_vocabulary() : io::read_vocabulary(vocab_path);
  const auto config = flags.config();
  const auto corpus = generate(config, vocab);
  io::write_vocabulary(out / "verbs.txt", vocab);
  io::write_records(out / "records.jsonl", corpus.records, vocab);
  io::write_features(out / "features.tsv", corpus.features);
  io::write_truth(out / "truth.json", corpus, vocab);
  std::cout << "wrote " << corpus.records.size() << " records for "
            << corpus.features.rows() << " videos to " << out.string() << "\n";
  return 0;
}

int run_train(const TrainFlags& flags, const std::string& vocab_path,
              const std::string& records_path, const std::string& features_path,
              const fs::path& out) {
  const auto vocab = load_vocab(vocab_path);
  TrainConfig config = flags.config();
  config.seed = flags.seed;
  const auto videos = aggregate(io::read_records(records_path, vocab), vocab);
  const auto labels = io::to_table(videos);
  const auto features = reorder(io::read_features(features_path), labels.video_ids);

  Eigen::MatrixXd targets = labels.values;
  if (config.loss == LossKind::kLogisticOneHot) {
    targets.setZero();
    for (std::size_t i = 0; i < videos.size(); ++i) {
      targets(static_cast<Eigen::Index>(i),
              static_cast<Eigen::Index>(majority_vote(videos[i]))) = 1.0;
    }
  }
  const auto result = train(features.values, targets, config);
  io::write_checkpoint(out / "checkpoint.json", {result.params, config, vocab.hash()});
  std::ostringstream loss;
  loss << "epoch\tloss\n";
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    loss << e << '\t' << result.epoch_loss[e] << '\n';
  }
  io::write_text(out / "loss.tsv", loss.str());
  std::cout << "trained " << to_string(config.loss) << " model on " << videos.size()
            << " videos; final loss " << result.epoch_loss.back() << "\n";
  return 0;
}

int run_predict(const std::string& checkpoint_path, const std::string& vocab_path,
                const std::string& features_path, const fs::path& out) {
  const auto vocab = load_vocab(vocab_path);
  const auto checkpoint = io::read_checkpoint(checkpoint_path);
  if (checkpoint.vocab_hash != vocab.hash()) {
    throw InputError("checkpoint was trained with a different vocabulary (hash " +
                     checkpoint.vocab_hash + ", given " + vocab.hash() + ")");
  }
  const auto features = io::read_features(features_path);
  const PredictionMatrix predictions{features.video_ids,
                                     predict_matrix(checkpoint.params, features.values)};
  io::write_predictions(out / "predictions.tsv", predictions, vocab);
  std::cout << "wrote predictions for " << predictions.rows() << " videos\n";
  return 0;
}

int run_evaluate(const std::string& vocab_path, const std::string& predictions_path,
                 const std::string& records_path, const std::string& labels_path,
                 const std::vector<double>& alphas, const fs::path& out) {
  const auto vocab = load_vocab(vocab_path);
  const auto labels = load_labels(records_path, labels_path, vocab);
  const auto predictions =
      reorder(io::read_predictions(predictions_path, vocab), labels.video_ids);
  const json result = report::evaluation_json(predictions, labels, alphas, vocab.verbs());
  io::write_text(out / "evaluation.json", result.dump(1) + "\n");
  io::write_text(out / "sweep.tsv", report::render_sweep(result));
  print_sweep("evaluation", result);
  return 0;
}

struct CrossvalFlags {
  std::string preset;
  std::string records, features;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  int folds = 5;
  CLI::Option* folds_opt = nullptr;
  double baseline_lr = 0.0;
  CLI::Option* baseline_lr_opt = nullptr;
  int top_k = 40;
  CLI::Option* top_k_opt = nullptr;
};

int run_crossval(const CrossvalFlags& flags, const TrainFlags& train_flags,
                 const std::string& vocab_path, const std::optional<std::vector<double>>& alphas,
                 const fs::path& out) {
  const bool preset = flags.preset == "benchmark";
  ExperimentConfig config = preset ? benchmark_experiment_config() : ExperimentConfig{};
  if (flags.seed_opt->count()) config.seed = flags.seed;
  if (flags.folds_opt->count()) config.n_folds = flags.folds;
  if (flags.top_k_opt->count()) config.top_k_pairs = flags.top_k;
  if (alphas) config.alphas = *alphas;
  train_flags.apply(config.proposed);
  // Shared training flags apply to both models except the learning rate,
  // which has its own baseline flag.
  const double baseline_lr = config.baseline.learning_rate;
  train_flags.apply(config.baseline);
  config.baseline.learning_rate =
      flags.baseline_lr_opt->count() ? flags.baseline_lr : baseline_lr;

  ExperimentReport result;
  if (flags.records.empty() && flags.features.empty()) {
    if (!preset) throw ConfigError("crossval needs --records and --features, or --preset");
    const VerbVocabulary vocab =
        vocab_path.empty() ? benchmark_vocabulary() : io::read_vocabulary(vocab_path);
    SynthConfig synth = benchmark_synth_config();
    if (flags.seed_opt->count()) synth.seed = flags.seed;
    const auto corpus = generate(synth, vocab);
    result = run_experiment(vocab, corpus.records, corpus.features, config);
  } else {
    if (flags.records.empty() || flags.features.empty()) {
      throw ConfigError("crossval needs both --records and --features");
    }
    if (vocab_path.empty()) throw ConfigError("--vocab is required with --records");
    result = run_experiment(fs::path(vocab_path), flags.records, flags.features, config);
  }
  report::emit_reports(result, out);
  std::cout << io::read_text(out / "table1.txt") << "\n" << io::read_text(out / "table2.txt");
  return 0;
}

int run_report(const std::string& in_path, const fs::path& out) {
  json doc;
  try {
    doc = json::parse(io::read_text(in_path));
  } catch (const json::exception& e) {
    throw InputError("'" + in_path + "' is not valid JSON: " + e.what());
  }
  if (doc.value("format", std::string{}) != "verbdist-report") {
    throw InputError("'" + in_path + "' is not a verbdist report");
  }
  try {
    report::emit_reports(doc, out);
  } catch (const json::exception& e) {
    throw InputError("'" + in_path + "' is missing report fields: " + e.what());
  }
  std::cout << io::read_text(out / "table1.txt") << "\n" << io::read_text(out / "table2.txt");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verb-distribution labelling toolkit"};
  app.require_subcommand(1);

  std::string vocab_path, out_dir = ".", alpha_text = "0.1:0.9:0.1";
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
  };
  auto add_vocab = [&](CLI::App* sub) {
    sub->add_option("--vocab", vocab_path, "Verb list, one per line");
  };

  std::string records_path, features_path, labels_path, predictions_path, checkpoint_path,
      report_path;
  int top_k = 40;

  auto* aggregate_cmd = app.add_subcommand("aggregate", "Annotation records to distributions");
  add_vocab(aggregate_cmd);
  aggregate_cmd->add_option("--records", records_path, "Records (JSON lines)")->required();
  add_out(aggregate_cmd);

  auto* stats_cmd = app.add_subcommand("stats", "Annotation statistics and co-occurrence");
  add_vocab(stats_cmd);
  stats_cmd->add_option("--records", records_path, "Records (JSON lines)")->required();
  stats_cmd->add_option("--top-k", top_k, "Co-occurring pairs to list")->capture_default_str();
  add_out(stats_cmd);

  SynthFlags synth_flags;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  add_vocab(synth_cmd);
  synth_flags.add_to(synth_cmd);
  add_out(synth_cmd);

  TrainFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Train one model on all videos");
  add_vocab(train_cmd);
  train_cmd->add_option("--records", records_path, "Records (JSON lines)")->required();
  train_cmd->add_option("--features", features_path, "Feature table")->required();
  train_cmd->add_option("--seed", train_flags.seed, "Random seed");
  train_flags.add_to(train_cmd, true);
  add_out(train_cmd);

  auto* predict_cmd = app.add_subcommand("predict", "Apply a checkpoint to features");
  add_vocab(predict_cmd);
  predict_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint.json")->required();
  predict_cmd->add_option("--features", features_path, "Feature table")->required();
  add_out(predict_cmd);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a prediction file");
  add_vocab(evaluate_cmd);
  evaluate_cmd->add_option("--predictions", predictions_path, "Prediction table")->required();
  evaluate_cmd->add_option("--records", records_path, "Records to aggregate as labels");
  evaluate_cmd->add_option("--labels", labels_path, "Aggregated label table");
  evaluate_cmd->add_option("--alpha", alpha_text, "Thresholds: start:stop:step or a,b,c")
      ->capture_default_str();
  add_out(evaluate_cmd);

  CrossvalFlags cv;
  TrainFlags cv_train;
  auto* crossval_cmd = app.add_subcommand("crossval", "Cross-validated comparison");
  add_vocab(crossval_cmd);
  crossval_cmd->add_option("--preset", cv.preset, "Named configuration")
      ->check(CLI::IsMember({"benchmark"}));
  crossval_cmd->add_option("--records", cv.records, "Records (JSON lines)");
  crossval_cmd->add_option("--features", cv.features, "Feature table");
  cv.seed_opt = crossval_cmd->add_option("--seed", cv.seed, "Random seed");
  cv.folds_opt = crossval_cmd->add_option("--folds", cv.folds, "Number of folds");
  cv.baseline_lr_opt =
      crossval_cmd->add_option("--baseline-lr", cv.baseline_lr, "Baseline learning rate");
  cv.top_k_opt = crossval_cmd->add_option("--top-k", cv.top_k, "Co-occurring pairs to list");
  auto* cv_alpha =
      crossval_cmd->add_option("--alpha", alpha_text, "Thresholds: start:stop:step or a,b,c");
  cv_train.add_to(crossval_cmd, false);
  add_out(crossval_cmd);

  auto* report_cmd = app.add_subcommand("report", "Re-render tables from report.json");
  report_cmd->add_option("--in", report_path, "report.json")->required();
  add_out(report_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::kConfigError);
  }

  try {
    const fs::path out(out_dir);
    if (*aggregate_cmd) return run_aggregate(vocab_path, records_path, out);
    if (*stats_cmd) return run_stats(vocab_path, records_path, top_k, out);
    if (*synth_cmd) return run_synth(synth_flags, vocab_path, out);
    if (*train_cmd) return run_train(train_flags, vocab_path, records_path, features_path, out);
    if (*predict_cmd) return run_predict(checkpoint_path, vocab_path, features_path, out);
    if (*evaluate_cmd) {
      return run_evaluate(vocab_path, predictions_path, records_path, labels_path,
                          parse_alpha_list(alpha_text), out);
    }
    if (*crossval_cmd) {
      std::optional<std::vector<double>> alphas;
      if (cv_alpha->count()) alphas = parse_alpha_list(alpha_text);
      return run_crossval(cv, cv_train, vocab_path, alphas, out);
    }
    if (*report_cmd) return run_report(report_path, out);
  } catch (const Error& e) {
    std::cerr << "verbdist: error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "verbdist: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
