#include "verbdist/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "verbdist/error.hpp"

namespace verbdist {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie strictly inside (0,1), got " +
                      std::to_string(alpha));
  }
}

std::vector<PerVerbError> per_verb_summary(const PredictionMatrix& predictions,
                                           const DistributionTable& labels,
                                           bool squared) {
  check_aligned(predictions, labels);
  std::vector<PerVerbError> out;
  const Eigen::Index cols = labels.values.cols();
  for (Eigen::Index j = 0; j < cols; ++j) {
    PerVerbError e;
    e.verb = static_cast<VerbIndex>(j);
    e.per_video_errors.reserve(labels.rows());
    for (Eigen::Index i = 0; i < labels.values.rows(); ++i) {
      const double d = std::abs(labels.values(i, j) - predictions.values(i, j));
      e.per_video_errors.push_back(squared ? d * d : d);
    }
    const Summary s = summarize(e.per_video_errors);
    e.mean = s.mean;
    e.median = s.median;
    e.q1 = s.q1;
    e.q3 = s.q3;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

void check_aligned(const PredictionMatrix& predictions,
                   const DistributionTable& labels) {
  if (labels.rows() == 0) throw InputError("empty evaluation set");
  if (predictions.video_ids != labels.video_ids) {
    throw InputError("prediction and label video sets are not aligned");
  }
  if (predictions.values.rows() != labels.values.rows() ||
      predictions.values.cols() != labels.values.cols() ||
      static_cast<std::size_t>(labels.values.rows()) != labels.rows()) {
    throw InputError("prediction and label matrices differ in shape");
  }
}

DistributionTable reorder(const DistributionTable& table,
                          std::span<const std::string> order) {
  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t i = 0; i < table.video_ids.size(); ++i) {
    row_of.emplace(table.video_ids[i], static_cast<Eigen::Index>(i));
  }
  DistributionTable out;
  out.video_ids.assign(order.begin(), order.end());
  out.values.resize(static_cast<Eigen::Index>(order.size()), table.values.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto it = row_of.find(order[i]);
    if (it == row_of.end()) throw InputError("missing video '" + order[i] + "'");
    out.values.row(static_cast<Eigen::Index>(i)) = table.values.row(it->second);
  }
  return out;
}

VerbIndex argmax(const Eigen::Ref<const Eigen::VectorXd>& row) {
  if (row.size() == 0) throw InputError("argmax of an empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return static_cast<VerbIndex>(best);
}

double accuracy_classification(const PredictionMatrix& predictions,
                               const DistributionTable& labels) {
  check_aligned(predictions, labels);
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < labels.values.rows(); ++i) {
    if (argmax(predictions.values.row(i).transpose()) ==
        argmax(labels.values.row(i).transpose())) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(labels.rows());
}

VerbSet annotated_set(const Eigen::Ref<const Eigen::VectorXd>& y, double alpha) {
  check_alpha(alpha);
  VerbSet out;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (y[j] > alpha) out.insert(static_cast<VerbIndex>(j));
  }
  return out;
}

VerbSet predicted_set(const Eigen::Ref<const Eigen::VectorXd>& y_hat, std::size_t k) {
  if (k == 0) throw ConfigError("top-k size must be positive");
  if (k > static_cast<std::size_t>(y_hat.size())) {
    throw ConfigError("top-k size " + std::to_string(k) +
                      " exceeds vocabulary size " + std::to_string(y_hat.size()));
  }
  std::vector<VerbIndex> idx(static_cast<std::size_t>(y_hat.size()));
  std::iota(idx.begin(), idx.end(), VerbIndex{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                    idx.end(), [&](VerbIndex a, VerbIndex b) {
                      const double va = y_hat[static_cast<Eigen::Index>(a)];
                      const double vb = y_hat[static_cast<Eigen::Index>(b)];
                      if (va != vb) return va > vb;
                      return a < b;
                    });
  return VerbSet(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
}

SetScore score_video(const Eigen::Ref<const Eigen::VectorXd>& y,
                     const Eigen::Ref<const Eigen::VectorXd>& y_hat, double alpha) {
  const VerbSet annotated = annotated_set(y, alpha);
  if (annotated.empty()) return {};
  const VerbSet predicted = predicted_set(y_hat, annotated.size());
  SetScore s;
  s.size = annotated.size();
  for (VerbIndex j : annotated) s.hits += predicted.count(j);
  return s;
}

EvalResult accuracy_probabilistic(const PredictionMatrix& predictions,
                                  const DistributionTable& labels, double alpha) {
  check_alpha(alpha);
  check_aligned(predictions, labels);
  EvalResult r;
  r.alpha = alpha;
  double score_sum = 0.0;
  std::vector<double> sizes;
  for (Eigen::Index i = 0; i < labels.values.rows(); ++i) {
    const SetScore s = score_video(labels.values.row(i).transpose(),
                                   predictions.values.row(i).transpose(), alpha);
    if (s.size == 0) continue;
    r.per_video_scores[labels.video_ids[static_cast<std::size_t>(i)]] = s.value();
    score_sum += s.value();
    sizes.push_back(static_cast<double>(s.size));
  }
  if (sizes.empty()) throw InputError("alpha too high for corpus");
  r.n_videos_evaluated = sizes.size();
  const double n = static_cast<double>(sizes.size());
  r.accuracy = score_sum / n;
  r.avg_verbs_per_video = std::accumulate(sizes.begin(), sizes.end(), 0.0) / n;
  double var = 0.0;
  for (double s : sizes) var += (s - r.avg_verbs_per_video) * (s - r.avg_verbs_per_video);
  r.std_verbs_per_video = std::sqrt(var / n);
  return r;
}

std::vector<double> default_alphas() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

std::vector<SweepRow> alpha_sweep(const PredictionMatrix& predictions,
                                  const DistributionTable& labels,
                                  std::span<const double> alphas) {
  if (alphas.empty()) throw ConfigError("alpha list is empty");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    check_alpha(alphas[i]);
    if (i > 0 && !(alphas[i] > alphas[i - 1])) {
      throw ConfigError("alpha list must be strictly increasing");
    }
  }
  check_aligned(predictions, labels);
  std::vector<SweepRow> rows;
  for (double alpha : alphas) {
    SweepRow row{alpha, std::nullopt};
    bool any = false;
    for (Eigen::Index i = 0; i < labels.values.rows() && !any; ++i) {
      any = (labels.values.row(i).array() > alpha).any();
    }
    if (any) row.result = accuracy_probabilistic(predictions, labels, alpha);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<PerVerbError> per_verb_error(const PredictionMatrix& predictions,
                                         const DistributionTable& labels) {
  return per_verb_summary(predictions, labels, false);
}

std::vector<PerVerbError> per_verb_squared_error(const PredictionMatrix& predictions,
                                                 const DistributionTable& labels) {
  return per_verb_summary(predictions, labels, true);
}

}  // namespace verbdist
