#include "verbdist/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "verbdist/error.hpp"

namespace verbdist::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string where(const fs::path& path, std::size_t line_no) {
  return "'" + path.string() + "' line " + std::to_string(line_no);
}

double parse_double(const std::string& field, const fs::path& path,
                    std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw InputError("malformed number '" + field + "' at " + where(path, line_no));
  }
  return value;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string exact(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void check_header_verbs(const std::vector<std::string>& header, std::size_t offset,
                        const VerbVocabulary& vocab, const fs::path& path) {
  if (header.size() != offset + vocab.size()) {
    throw InputError("'" + path.string() + "' has " +
                     std::to_string(header.size() - std::min(header.size(), offset)) +
                     " verb columns, vocabulary has " + std::to_string(vocab.size()));
  }
  for (std::size_t j = 0; j < vocab.size(); ++j) {
    if (header[offset + j] != vocab.at(j)) {
      throw InputError("'" + path.string() + "' column " +
                       std::to_string(offset + j + 1) + " is '" + header[offset + j] +
                       "', expected verb '" + vocab.at(j) + "'");
    }
  }
}

json layer_to_json(const Layer& layer) {
  json weights = json::array();
  for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
      weights.push_back(layer.weights(r, c));
    }
  }
  return {{"rows", layer.weights.rows()},
          {"cols", layer.weights.cols()},
          {"weights_row_major", std::move(weights)},
          {"bias", std::vector<double>(layer.bias.data(),
                                       layer.bias.data() + layer.bias.size())}};
}

Layer layer_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto weights = j.at("weights_row_major").get<std::vector<double>>();
  const auto bias = j.at("bias").get<std::vector<double>>();
  if (rows <= 0 || cols <= 0 || weights.size() != static_cast<std::size_t>(rows * cols) ||
      bias.size() != static_cast<std::size_t>(rows)) {
    throw InputError("checkpoint layer has inconsistent dimensions");
  }
  Layer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      layer.weights(r, c) = weights[static_cast<std::size_t>(r * cols + c)];
    }
    layer.bias[r] = bias[static_cast<std::size_t>(r)];
  }
  return layer;
}

}  // namespace

VerbVocabulary read_vocabulary(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::string> verbs;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.find('\t') != std::string::npos) {
      throw InputError("tab character in verb at " + where(path, line_no));
    }
    verbs.push_back(line);
  }
  try {
    return VerbVocabulary(std::move(verbs));
  } catch (const InputError& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

void write_vocabulary(const fs::path& path, const VerbVocabulary& vocab) {
  auto out = open_out(path);
  for (const auto& verb : vocab.verbs()) out << verb << '\n';
  finish(out, path);
}

std::vector<AnnotationRecord> read_records(const fs::path& path,
                                           const VerbVocabulary& vocab) {
  auto in = open_in(path);
  std::vector<AnnotationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError("invalid JSON at " + where(path, line_no) + ": " + e.what());
    }
    AnnotationRecord r;
    try {
      r.video_id = j.at("video_id").get<std::string>();
      r.worker_id = j.at("worker_id").get<std::string>();
      r.class_label = j.value("class_label", std::string{});
      r.dataset_tag = j.value("dataset_tag", std::string{});
      for (const auto& verb : j.at("verbs")) {
        const auto name = verb.get<std::string>();
        const auto index = vocab.find(name);
        if (!index) {
          throw InputError("unknown verb '" + name + "' at " + where(path, line_no));
        }
        r.verbs_selected.insert(*index);
      }
    } catch (const json::exception& e) {
      throw InputError("malformed record at " + where(path, line_no) + ": " + e.what());
    }
    if (r.verbs_selected.empty()) {
      throw InputError("record with no verbs at " + where(path, line_no));
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_records(const fs::path& path, const std::vector<AnnotationRecord>& records,
                   const VerbVocabulary& vocab) {
  auto out = open_out(path);
  for (const auto& r : records) {
    json verbs = json::array();
    for (VerbIndex j : r.verbs_selected) verbs.push_back(vocab.at(j));
    json line = {{"video_id", r.video_id},
                 {"worker_id", r.worker_id},
                 {"class_label", r.class_label},
                 {"dataset_tag", r.dataset_tag},
                 {"verbs", std::move(verbs)}};
    out << line.dump() << '\n';
  }
  finish(out, path);
}

std::vector<VideoAnnotation> read_aggregated(const fs::path& path,
                                             const VerbVocabulary& vocab) {
  auto in = open_in(path);
  std::string line;
  if (!next_line(in, line)) throw InputError("'" + path.string() + "' is empty");
  const auto header = split_tabs(line);
  const std::vector<std::string> fixed = {"video_id", "class_label", "dataset_tag",
                                          "annotator_count"};
  if (header.size() < fixed.size() ||
      !std::equal(fixed.begin(), fixed.end(), header.begin())) {
    throw InputError("'" + path.string() + "' lacks the aggregated-file header");
  }
  check_header_verbs(header, fixed.size(), vocab, path);

  std::vector<VideoAnnotation> out;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != header.size()) {
      throw InputError("expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()) + " at " + where(path, line_no));
    }
    VideoAnnotation va;
    va.video_id = fields[0];
    va.class_label = fields[1];
    va.dataset_tag = fields[2];
    const double count = parse_double(fields[3], path, line_no);
    va.annotator_count = static_cast<int>(count);
    if (count < 1 || va.annotator_count != count) {
      throw InputError("annotator_count must be a positive integer at " +
                       where(path, line_no));
    }
    va.distribution.resize(static_cast<Eigen::Index>(vocab.size()));
    for (std::size_t j = 0; j < vocab.size(); ++j) {
      const double p = parse_double(fields[4 + j], path, line_no);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InputError("probability outside [0,1] at " + where(path, line_no));
      }
      va.distribution[static_cast<Eigen::Index>(j)] = p;
    }
    out.push_back(std::move(va));
  }
  return out;
}

void write_aggregated(const fs::path& path, const std::vector<VideoAnnotation>& videos,
                      const VerbVocabulary& vocab) {
  auto out = open_out(path);
  out << "video_id\tclass_label\tdataset_tag\tannotator_count";
  for (const auto& verb : vocab.verbs()) out << '\t' << verb;
  out << '\n';
  for (const auto& va : videos) {
    out << va.video_id << '\t' << va.class_label << '\t' << va.dataset_tag << '\t'
        << va.annotator_count;
    for (Eigen::Index j = 0; j < va.distribution.size(); ++j) {
      out << '\t' << fixed6(va.distribution[j]);
    }
    out << '\n';
  }
  finish(out, path);
}

DistributionTable read_features(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!next_line(in, line)) throw InputError("'" + path.string() + "' is empty");
  const auto header = split_tabs(line);
  if (header.size() < 2 || header[0] != "video_id") {
    throw InputError("'" + path.string() + "' lacks a 'video_id' feature header");
  }
  const auto dim = static_cast<Eigen::Index>(header.size() - 1);
  std::vector<std::vector<double>> rows;
  DistributionTable table;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != header.size()) {
      throw InputError("expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()) + " at " + where(path, line_no));
    }
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const double v = parse_double(fields[i], path, line_no);
      if (!std::isfinite(v)) {
        throw InputError("non-finite feature at " + where(path, line_no));
      }
      row.push_back(v);
    }
    table.video_ids.push_back(fields[0]);
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      table.values(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
  }
  return table;
}

void write_features(const fs::path& path, const DistributionTable& features) {
  auto out = open_out(path);
  out << "video_id";
  for (Eigen::Index d = 0; d < features.values.cols(); ++d) out << "\tf" << d;
  out << '\n';
  for (std::size_t r = 0; r < features.rows(); ++r) {
    out << features.video_ids[r];
    for (Eigen::Index d = 0; d < features.values.cols(); ++d) {
      out << '\t' << exact(features.values(static_cast<Eigen::Index>(r), d));
    }
    out << '\n';
  }
  finish(out, path);
}

PredictionMatrix read_predictions(const fs::path& path, const VerbVocabulary& vocab) {
  auto in = open_in(path);
  std::string line;
  if (!next_line(in, line)) throw InputError("'" + path.string() + "' is empty");
  const auto header = split_tabs(line);
  if (header.empty() || header[0] != "video_id") {
    throw InputError("'" + path.string() + "' lacks a 'video_id' prediction header");
  }
  check_header_verbs(header, 1, vocab, path);
  PredictionMatrix table;
  std::vector<double> flat;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != header.size()) {
      throw InputError("expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()) + " at " + where(path, line_no));
    }
    table.video_ids.push_back(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      flat.push_back(parse_double(fields[i], path, line_no));
    }
  }
  const auto cols = static_cast<Eigen::Index>(vocab.size());
  table.values.resize(static_cast<Eigen::Index>(table.video_ids.size()), cols);
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      table.values(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
    }
  }
  return table;
}

void write_predictions(const fs::path& path, const PredictionMatrix& predictions,
                       const VerbVocabulary& vocab) {
  if (predictions.values.cols() != static_cast<Eigen::Index>(vocab.size())) {
    throw InputError("prediction width does not match vocabulary");
  }
  auto out = open_out(path);
  out << "video_id";
  for (const auto& verb : vocab.verbs()) out << '\t' << verb;
  out << '\n';
  for (std::size_t r = 0; r < predictions.rows(); ++r) {
    out << predictions.video_ids[r];
    for (Eigen::Index c = 0; c < predictions.values.cols(); ++c) {
      out << '\t' << exact(predictions.values(static_cast<Eigen::Index>(r), c));
    }
    out << '\n';
  }
  finish(out, path);
}

json to_json(const TrainConfig& c) {
  return {{"loss", to_string(c.loss)},
          {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"momentum", c.momentum},
          {"weight_decay", c.weight_decay},
          {"seed", c.seed},
          {"lr_step_epochs", c.lr_step_epochs},
          {"architecture", to_string(c.architecture)},
          {"hidden_units", c.hidden_units}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.loss = parse_loss(j.at("loss").get<std::string>());
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.momentum = j.at("momentum").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.lr_step_epochs = j.value("lr_step_epochs", std::vector<int>{});
  c.architecture = parse_architecture(j.value("architecture", std::string("linear")));
  c.hidden_units = j.value("hidden_units", 0);
  return c;
}

json checkpoint_to_json(const Checkpoint& cp) {
  json layers = json::array();
  for (const auto& layer : cp.params.layers) layers.push_back(layer_to_json(layer));
  const ModelShape shape = cp.params.shape();
  return {{"format", "verbdist-checkpoint"},
          {"version", kCheckpointVersion},
          {"architecture", to_string(cp.params.architecture)},
          {"output_activation", to_string(cp.params.output_activation)},
          {"input_dim", shape.input_dim},
          {"hidden_units", shape.hidden_units},
          {"output_dim", shape.output_dim},
          {"vocab_hash", cp.vocab_hash},
          {"layers", std::move(layers)},
          {"train_config", to_json(cp.config)}};
}

Checkpoint checkpoint_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "verbdist-checkpoint") {
      throw InputError("not a verbdist checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw InputError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint cp;
    cp.params.architecture = parse_architecture(j.at("architecture").get<std::string>());
    cp.params.output_activation =
        parse_output_activation(j.at("output_activation").get<std::string>());
    for (const auto& layer : j.at("layers")) {
      cp.params.layers.push_back(layer_from_json(layer));
    }
    const std::size_t expected_layers =
        cp.params.architecture == Architecture::kLinear ? 1 : 2;
    if (cp.params.layers.size() != expected_layers) {
      throw InputError("checkpoint layer count does not match architecture");
    }
    for (std::size_t l = 1; l < cp.params.layers.size(); ++l) {
      if (cp.params.layers[l].weights.cols() != cp.params.layers[l - 1].weights.rows()) {
        throw InputError("checkpoint layers do not chain");
      }
    }
    if (cp.params.input_dim() != j.at("input_dim").get<Eigen::Index>() ||
        cp.params.output_dim() != j.at("output_dim").get<Eigen::Index>()) {
      throw InputError("checkpoint dimensions disagree with its layers");
    }
    cp.vocab_hash = j.at("vocab_hash").get<std::string>();
    cp.config = train_config_from_json(j.at("train_config"));
    return cp;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw InputError(std::string("malformed checkpoint: ") + e.what());
  }
}

void write_checkpoint(const fs::path& path, const Checkpoint& checkpoint) {
  write_text(path, checkpoint_to_json(checkpoint).dump(1) + "\n");
}

Checkpoint read_checkpoint(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    return checkpoint_from_json(j);
  } catch (const InputError& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

void write_truth(const fs::path& path, const SyntheticCorpus& corpus,
                 const VerbVocabulary& vocab) {
  json classes = json::array();
  for (const auto& lc : corpus.classes) {
    json profile = json::object();
    for (std::size_t j = 0; j < vocab.size(); ++j) {
      const double p = lc.profile[static_cast<Eigen::Index>(j)];
      if (p > 0.0) profile[vocab.at(j)] = p;
    }
    classes.push_back(
        {{"class_id", lc.class_id},
         {"profile", std::move(profile)},
         {"feature_centroid",
          std::vector<double>(lc.feature_centroid.data(),
                              lc.feature_centroid.data() + lc.feature_centroid.size())}});
  }
  json assignment = json::object();
  for (std::size_t i = 0; i < corpus.features.video_ids.size(); ++i) {
    assignment[corpus.features.video_ids[i]] =
        corpus.classes[corpus.video_class[i]].class_id;
  }
  json doc = {{"vocab_hash", vocab.hash()},
              {"classes", std::move(classes)},
              {"assignment", std::move(assignment)}};
  write_text(path, doc.dump(1) + "\n");
}

DistributionTable to_table(const std::vector<VideoAnnotation>& videos) {
  DistributionTable t;
  if (videos.empty()) return t;
  t.values.resize(static_cast<Eigen::Index>(videos.size()),
                  videos.front().distribution.size());
  for (std::size_t i = 0; i < videos.size(); ++i) {
    t.video_ids.push_back(videos[i].video_id);
    t.values.row(static_cast<Eigen::Index>(i)) = videos[i].distribution.transpose();
  }
  return t;
}

void write_text(const fs::path& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  finish(out, path);
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace verbdist::io
