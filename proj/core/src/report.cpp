#include "verbdist/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "verbdist/error.hpp"
#include "verbdist/io.hpp"

namespace verbdist::report {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

json sweep_row_json(const SweepRow& row, bool include_scores) {
  json j = {{"alpha", row.alpha}, {"empty", !row.result.has_value()}};
  if (row.result) {
    const EvalResult& r = *row.result;
    j["n_videos"] = r.n_videos_evaluated;
    j["avg_verbs_per_video"] = r.avg_verbs_per_video;
    j["std_verbs_per_video"] = r.std_verbs_per_video;
    j["accuracy"] = r.accuracy;
    if (include_scores) j["per_video_scores"] = r.per_video_scores;
  }
  return j;
}

json method_json(const MethodResult& r, bool include_scores) {
  json sweep = json::array();
  for (const auto& row : r.sweep) sweep.push_back(sweep_row_json(row, include_scores));
  return {{"classification_accuracy", r.classification_accuracy}, {"sweep", std::move(sweep)}};
}

json mean_json(const MeanResult& m) {
  json sweep = json::array();
  for (const auto& row : m.sweep) {
    json j = {{"alpha", row.alpha}, {"folds_with_videos", row.folds_with_videos}};
    j["accuracy"] = row.folds_with_videos > 0 ? json(row.accuracy) : json(nullptr);
    sweep.push_back(std::move(j));
  }
  return {{"classification_accuracy", m.classification_accuracy}, {"sweep", std::move(sweep)}};
}

json pairs_json(std::span<const SymmetricPair> pairs, const std::vector<std::string>& verbs) {
  json out = json::array();
  for (const auto& p : pairs) {
    out.push_back({{"verb_i", verbs.at(p.i)},
                   {"verb_j", verbs.at(p.j)},
                   {"per_dataset", p.per_dataset},
                   {"combined", p.combined}});
  }
  return out;
}

json summary_json(const Summary& s) {
  return {{"n", s.n},   {"min", s.min},       {"q1", s.q1},     {"median", s.median},
          {"q3", s.q3}, {"max", s.max},       {"mean", s.mean}};
}

const json* find_sweep_row(const json& method, double alpha) {
  for (const auto& row : method.at("sweep")) {
    if (std::abs(row.at("alpha").get<double>() - alpha) < 1e-12) return &row;
  }
  return nullptr;
}

std::string percent_or_dash(const json* row) {
  if (row == nullptr || row->at("empty").get<bool>()) return "-";
  return fmt("%.1f", 100.0 * row->at("accuracy").get<double>());
}

std::string pairs_tsv_from_json(const json& pairs, const json& tags) {
  std::ostringstream out;
  out << "rank\tverb_i\tverb_j";
  for (const auto& tag : tags) out << "\tS_" << tag.get<std::string>();
  out << "\tS_combined\n";
  int rank = 1;
  for (const auto& p : pairs) {
    out << rank++ << '\t' << p.at("verb_i").get<std::string>() << '\t'
        << p.at("verb_j").get<std::string>();
    for (const auto& s : p.at("per_dataset")) out << '\t' << fmt("%.6f", s.get<double>());
    out << '\t' << fmt("%.6f", p.at("combined").get<double>()) << '\n';
  }
  return out.str();
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  return {{"n_folds", c.n_folds},
          {"seed", c.seed},
          {"alphas", c.alphas},
          {"proposed", io::to_json(c.proposed)},
          {"baseline", io::to_json(c.baseline)},
          {"top_k_pairs", c.top_k_pairs},
          {"cooccurrence_alpha", c.cooccurrence_alpha}};
}

json to_json(const MethodResult& result) { return method_json(result, true); }

json to_json(std::span<const PerVerbError> errors, const std::vector<std::string>& verbs) {
  json out = json::array();
  for (const auto& e : errors) {
    out.push_back({{"verb", verbs.at(e.verb)},
                   {"mean", e.mean},
                   {"median", e.median},
                   {"q1", e.q1},
                   {"q3", e.q3}});
  }
  return out;
}

json to_json(const ExperimentReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"proposed", method_json(f.proposed, false)},
                     {"baseline", method_json(f.baseline, false)},
                     {"proposed_epoch_loss", f.proposed_loss},
                     {"baseline_epoch_loss", f.baseline_loss}});
  }

  json classes = json::array();
  for (const auto& [label, s] : r.annotation_stats.verbs_per_annotator) {
    json c = {{"class_label", label}, {"verbs_per_annotator", summary_json(s)}};
    c["unique_verbs"] = r.annotation_stats.unique_verbs.at(label);
    classes.push_back(std::move(c));
  }
  json counts = json::array();
  for (std::size_t j = 0; j < r.verbs.size(); ++j) {
    counts.push_back({{"verb", r.verbs[j]}, {"count", r.annotation_stats.verb_counts.at(j)}});
  }

  json correlations = json::array();
  if (r.size_score_correlation) {
    const auto& c = *r.size_score_correlation;
    correlations.push_back(
        {{"x", c.x_name}, {"y", c.y_name}, {"r_squared", c.r_squared}, {"n", c.n}});
  }

  return {{"format", "verbdist-report"},
          {"version", kReportVersion},
          {"vocab_hash", r.vocab_hash},
          {"verbs", r.verbs},
          {"n_videos", r.n_videos},
          {"config", to_json(r.config)},
          {"folds", std::move(folds)},
          {"mean", {{"proposed", mean_json(r.proposed_mean)},
                    {"baseline", mean_json(r.baseline_mean)}}},
          {"pooled", {{"proposed", method_json(r.proposed_pooled, true)},
                      {"baseline", method_json(r.baseline_pooled, true)}}},
          {"per_verb_error", {{"proposed", to_json(r.proposed_verb_error, r.verbs)},
                              {"baseline", to_json(r.baseline_verb_error, r.verbs)}}},
          {"predicted_cooccurrence", {{"alpha", r.config.cooccurrence_alpha},
                                      {"dataset_tags", r.dataset_tags},
                                      {"top_pairs", pairs_json(r.predicted_top_pairs, r.verbs)}}},
          {"annotation_statistics", {{"classes", std::move(classes)},
                                     {"verb_counts", std::move(counts)},
                                     {"dataset_tags", r.annotation_stats.dataset_tags},
                                     {"top_pairs", pairs_json(r.annotation_stats.top_pairs, r.verbs)}}},
          {"correlations", std::move(correlations)}};
}

std::string render_table1(const json& report) {
  const json& pooled = report.at("pooled");
  std::ostringstream out;
  out << "Accuracy (%), pooled over " << report.at("n_videos").get<std::size_t>()
      << " held-out videos, " << report.at("config").at("n_folds").get<int>() << " folds\n\n";
  out << pad("", 34) << lpad("pooled", 8) << lpad("mean", 8) << '\n';
  const json& mean = report.at("mean");
  out << pad("Classification (argmax accuracy)", 34)
      << lpad(fmt("%.1f", 100.0 * pooled.at("baseline").at("classification_accuracy").get<double>()), 8)
      << lpad(fmt("%.1f", 100.0 * mean.at("baseline").at("classification_accuracy").get<double>()), 8)
      << '\n';
  const json* p = find_sweep_row(pooled.at("proposed"), 0.5);
  const json* pm = find_sweep_row(mean.at("proposed"), 0.5);
  std::string mean_cell = "-";
  if (pm != nullptr && !pm->at("accuracy").is_null()) {
    mean_cell = fmt("%.1f", 100.0 * pm->at("accuracy").get<double>());
  }
  out << pad("Proposed (set retrieval, a=0.5)", 34) << lpad(percent_or_dash(p), 8)
      << lpad(mean_cell, 8) << '\n';

  out << "\nPer fold:\n";
  out << pad("fold", 6) << lpad("n_test", 8) << lpad("cls", 8) << lpad("prop", 8) << '\n';
  for (const auto& f : report.at("folds")) {
    out << pad(std::to_string(f.at("fold").get<int>()), 6)
        << lpad(std::to_string(f.at("n_test").get<std::size_t>()), 8)
        << lpad(fmt("%.1f", 100.0 * f.at("baseline").at("classification_accuracy").get<double>()), 8)
        << lpad(percent_or_dash(find_sweep_row(f.at("proposed"), 0.5)), 8) << '\n';
  }
  return out.str();
}

std::string render_table2(const json& report) {
  const json& pooled = report.at("pooled");
  const json& alphas = report.at("config").at("alphas");
  std::ostringstream out;
  constexpr std::size_t kLabel = 28;
  constexpr std::size_t kCell = 7;
  out << pad("alpha", kLabel);
  for (const auto& a : alphas) out << lpad(fmt("%.2g", a.get<double>()), kCell);
  out << "\n" << pad("Number of Videos", kLabel);
  for (const auto& a : alphas) {
    const json* row = find_sweep_row(pooled.at("proposed"), a.get<double>());
    out << lpad(row == nullptr || row->at("empty").get<bool>()
                    ? "-"
                    : std::to_string(row->at("n_videos").get<std::size_t>()),
                kCell);
  }
  out << "\n" << pad("Avg. Verbs per Video", kLabel);
  for (const auto& a : alphas) {
    const json* row = find_sweep_row(pooled.at("proposed"), a.get<double>());
    out << lpad(row == nullptr || row->at("empty").get<bool>()
                    ? "-"
                    : fmt("%.3g", row->at("avg_verbs_per_video").get<double>()),
                kCell);
  }
  out << "\n" << pad("Scores from Classification", kLabel);
  for (const auto& a : alphas) {
    out << lpad(percent_or_dash(find_sweep_row(pooled.at("baseline"), a.get<double>())), kCell);
  }
  out << "\n" << pad("Proposed Method", kLabel);
  for (const auto& a : alphas) {
    out << lpad(percent_or_dash(find_sweep_row(pooled.at("proposed"), a.get<double>())), kCell);
  }
  out << "\n";
  return out.str();
}

std::string render_sweep(const json& method_result) {
  std::ostringstream out;
  out << "alpha\tn_videos\tavg_verbs_per_video\tstd_verbs_per_video\taccuracy\n";
  for (const auto& row : method_result.at("sweep")) {
    out << fmt("%.6g", row.at("alpha").get<double>());
    if (row.at("empty").get<bool>()) {
      out << "\t-\t-\t-\t-\n";
      continue;
    }
    out << '\t' << row.at("n_videos").get<std::size_t>() << '\t'
        << fmt("%.6f", row.at("avg_verbs_per_video").get<double>()) << '\t'
        << fmt("%.6f", row.at("std_verbs_per_video").get<double>()) << '\t'
        << fmt("%.6f", row.at("accuracy").get<double>()) << '\n';
  }
  return out.str();
}

void emit_reports(const json& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw InputError("cannot create output directory '" + out_dir.string() +
                     "': " + ec.message());
  }
  io::write_text(out_dir / "report.json", report.dump(1) + "\n");
  io::write_text(out_dir / "table1.txt", render_table1(report));
  io::write_text(out_dir / "table2.txt", render_table2(report));

  {
    std::ostringstream tsv;
    tsv << "alpha\tn_videos\tavg_verbs_per_video\tstd_verbs_per_video\t"
           "classification_scores\tproposed\n";
    const json& pooled = report.at("pooled");
    for (const auto& a : report.at("config").at("alphas")) {
      const double alpha = a.get<double>();
      const json* prop = find_sweep_row(pooled.at("proposed"), alpha);
      const json* base = find_sweep_row(pooled.at("baseline"), alpha);
      tsv << fmt("%.6g", alpha);
      if (prop == nullptr || prop->at("empty").get<bool>()) {
        tsv << "\t-\t-\t-\t-\t-\n";
        continue;
      }
      tsv << '\t' << prop->at("n_videos").get<std::size_t>() << '\t'
          << fmt("%.6f", prop->at("avg_verbs_per_video").get<double>()) << '\t'
          << fmt("%.6f", prop->at("std_verbs_per_video").get<double>()) << '\t'
          << fmt("%.6f", base->at("accuracy").get<double>()) << '\t'
          << fmt("%.6f", prop->at("accuracy").get<double>()) << '\n';
    }
    io::write_text(out_dir / "table2.tsv", tsv.str());
  }

  {
    std::ostringstream tsv;
    tsv << "verb\tproposed_mean\tproposed_median\tproposed_q1\tproposed_q3\t"
           "baseline_mean\tbaseline_median\tbaseline_q1\tbaseline_q3\n";
    const json& prop = report.at("per_verb_error").at("proposed");
    const json& base = report.at("per_verb_error").at("baseline");
    for (std::size_t j = 0; j < prop.size(); ++j) {
      tsv << prop[j].at("verb").get<std::string>();
      for (const json* e : {&prop[j], &base[j]}) {
        for (const char* key : {"mean", "median", "q1", "q3"}) {
          tsv << '\t' << fmt("%.6f", e->at(key).get<double>());
        }
      }
      tsv << '\n';
    }
    io::write_text(out_dir / "per_verb_error.tsv", tsv.str());
  }

  const json& pred = report.at("predicted_cooccurrence");
  io::write_text(out_dir / "predicted_cooccurrence.tsv",
                 pairs_tsv_from_json(pred.at("top_pairs"), pred.at("dataset_tags")));

  const json& stats = report.at("annotation_statistics");
  io::write_text(out_dir / "annotation_cooccurrence.tsv",
                 pairs_tsv_from_json(stats.at("top_pairs"), stats.at("dataset_tags")));
  {
    std::ostringstream tsv;
    tsv << "class_label\tn_annotations\tverbs_min\tverbs_q1\tverbs_median\tverbs_q3\t"
           "verbs_max\tverbs_mean\tunique_verbs\n";
    for (const auto& c : stats.at("classes")) {
      const json& s = c.at("verbs_per_annotator");
      tsv << c.at("class_label").get<std::string>() << '\t' << s.at("n").get<std::size_t>();
      for (const char* key : {"min", "q1", "median", "q3", "max", "mean"}) {
        tsv << '\t' << fmt("%.6g", s.at(key).get<double>());
      }
      tsv << '\t' << c.at("unique_verbs").get<std::size_t>() << '\n';
    }
    io::write_text(out_dir / "annotation_stats.tsv", tsv.str());
  }
  {
    std::ostringstream tsv;
    tsv << "verb\tcount\n";
    for (const auto& c : stats.at("verb_counts")) {
      tsv << c.at("verb").get<std::string>() << '\t' << c.at("count").get<std::int64_t>()
          << '\n';
    }
    io::write_text(out_dir / "verb_counts.tsv", tsv.str());
  }
}

void emit_reports(const ExperimentReport& report, const fs::path& out_dir) {
  emit_reports(to_json(report), out_dir);
  const json meta = {{"started_at", report.started_at},
                     {"finished_at", report.finished_at},
                     {"vocab_hash", report.vocab_hash}};
  io::write_text(out_dir / "run_meta.json", meta.dump(1) + "\n");
}

std::string cooccurrence_tsv(const CooccurrenceMatrix& m,
                             const std::vector<std::string>& verbs) {
  std::ostringstream out;
  out << "verb_i\tverb_j\tC\tN_ij\tN_ji\tS\tdataset_tag\n";
  for (Eigen::Index i = 0; i < m.counts.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.counts.cols(); ++j) {
      if (m.counts(i, j) == 0) continue;
      out << verbs.at(static_cast<std::size_t>(i)) << '\t'
          << verbs.at(static_cast<std::size_t>(j)) << '\t' << m.counts(i, j) << '\t'
          << fmt("%.6f", m.row_normalized(i, j)) << '\t'
          << fmt("%.6f", m.row_normalized(j, i)) << '\t' << fmt("%.6f", m.symmetric(i, j))
          << '\t' << m.dataset_tag << '\n';
    }
  }
  return out.str();
}

std::string top_pairs_tsv(std::span<const SymmetricPair> pairs,
                          const std::vector<std::string>& verbs,
                          const std::vector<std::string>& dataset_tags) {
  return pairs_tsv_from_json(pairs_json(pairs, verbs), json(dataset_tags));
}

std::string class_summary_tsv(const AnnotationStatistics& stats) {
  std::ostringstream tsv;
  tsv << "class_label\tn_annotations\tverbs_min\tverbs_q1\tverbs_median\tverbs_q3\t"
         "verbs_max\tverbs_mean\tunique_verbs\n";
  for (const auto& [label, s] : stats.verbs_per_annotator) {
    tsv << label << '\t' << s.n;
    for (double v : {s.min, s.q1, s.median, s.q3, s.max, s.mean}) {
      tsv << '\t' << fmt("%.6g", v);
    }
    tsv << '\t' << stats.unique_verbs.at(label) << '\n';
  }
  return tsv.str();
}

json evaluation_json(const PredictionMatrix& predictions, const DistributionTable& labels,
                     std::span<const double> alphas, const std::vector<std::string>& verbs) {
  MethodResult r;
  r.classification_accuracy = accuracy_classification(predictions, labels);
  r.sweep = alpha_sweep(predictions, labels, alphas);
  json j = method_json(r, true);
  j["n_videos"] = labels.rows();
  j["per_verb_error"] = to_json(per_verb_error(predictions, labels), verbs);
  return j;
}

}  // namespace verbdist::report
