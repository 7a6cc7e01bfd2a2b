#include "verbdist/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "verbdist/error.hpp"

namespace verbdist {

namespace {

CooccurrenceMatrix finish(CountMatrix counts, std::string dataset_tag) {
  const Eigen::Index n = counts.rows();
  CooccurrenceMatrix m;
  m.row_normalized = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int64_t row_sum = counts.row(i).sum();
    if (row_sum == 0) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      m.row_normalized(i, j) =
          static_cast<double>(counts(i, j)) / static_cast<double>(row_sum);
    }
  }
  m.symmetric = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = (m.row_normalized(i, j) + m.row_normalized(j, i)) / 2.0;
      m.symmetric(i, j) = s;
      m.symmetric(j, i) = s;
    }
  }
  m.counts = std::move(counts);
  m.dataset_tag = std::move(dataset_tag);
  return m;
}

void add_pairs(const VerbSet& verbs, CountMatrix& counts) {
  const auto n = static_cast<VerbIndex>(counts.rows());
  if (!verbs.empty() && *verbs.rbegin() >= n) {
    throw InputError("verb index " + std::to_string(*verbs.rbegin()) +
                     " outside vocabulary of size " + std::to_string(n));
  }
  for (auto a = verbs.begin(); a != verbs.end(); ++a) {
    for (auto b = std::next(a); b != verbs.end(); ++b) {
      const auto i = static_cast<Eigen::Index>(*a);
      const auto j = static_cast<Eigen::Index>(*b);
      ++counts(i, j);
      ++counts(j, i);
    }
  }
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

CooccurrenceMatrix cooccurrence_counts(std::span<const VerbSet> sources,
                                       std::size_t vocab_size,
                                       std::string dataset_tag) {
  if (sources.empty()) throw InputError("empty co-occurrence source");
  const auto n = static_cast<Eigen::Index>(vocab_size);
  CountMatrix counts = CountMatrix::Zero(n, n);
  for (const auto& verbs : sources) add_pairs(verbs, counts);
  return finish(std::move(counts), std::move(dataset_tag));
}

CooccurrenceMatrix cooccurrence_counts(std::span<const AnnotationRecord> records,
                                       std::size_t vocab_size,
                                       std::string dataset_tag) {
  if (records.empty()) throw InputError("empty co-occurrence source");
  const auto n = static_cast<Eigen::Index>(vocab_size);
  CountMatrix counts = CountMatrix::Zero(n, n);
  for (const auto& record : records) add_pairs(record.verbs_selected, counts);
  return finish(std::move(counts), std::move(dataset_tag));
}

std::vector<VerbSet> binarize(const Eigen::MatrixXd& values, double alpha) {
  std::vector<VerbSet> out(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (values(r, c) > alpha) out[static_cast<std::size_t>(r)].insert(
          static_cast<VerbIndex>(c));
    }
  }
  return out;
}

std::vector<SymmetricPair> top_symmetric_pairs(
    std::span<const CooccurrenceMatrix> matrices, int k) {
  if (k <= 0) throw ConfigError("top-k pair count must be positive");
  if (matrices.empty()) throw InputError("no co-occurrence matrices given");
  const std::size_t n = matrices.front().size();
  for (const auto& m : matrices) {
    if (m.size() != n) {
      throw InputError("co-occurrence matrices use different vocabularies");
    }
  }

  std::vector<SymmetricPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      SymmetricPair p{i, j, {}, 0.0};
      for (const auto& m : matrices) {
        const double s = m.symmetric(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(j));
        p.per_dataset.push_back(s);
        p.combined += s;
      }
      if (p.combined > 0.0) pairs.push_back(std::move(p));
    }
  }
  const auto order = [](const SymmetricPair& a, const SymmetricPair& b) {
    if (a.combined != b.combined) return a.combined > b.combined;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  };
  const auto keep = std::min(pairs.size(), static_cast<std::size_t>(k));
  std::partial_sort(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(keep),
                    pairs.end(), order);
  pairs.resize(keep);
  return pairs;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw InputError("cannot summarize an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  Summary s;
  s.n = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile(sorted, 0.25);
  s.median = quantile(sorted, 0.5);
  s.q3 = quantile(sorted, 0.75);
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
           static_cast<double>(sorted.size());
  return s;
}

std::map<std::string, Summary> verbs_per_annotator(
    std::span<const AnnotationRecord> records) {
  if (records.empty()) throw InputError("no annotations");
  std::map<std::string, std::vector<double>> sizes;
  for (const auto& record : records) {
    sizes[record.class_label].push_back(
        static_cast<double>(record.verbs_selected.size()));
  }
  std::map<std::string, Summary> out;
  for (const auto& [label, values] : sizes) out.emplace(label, summarize(values));
  return out;
}

std::map<std::string, std::size_t> unique_verbs_per_class(
    std::span<const AnnotationRecord> records) {
  std::map<std::string, VerbSet> seen;
  for (const auto& record : records) {
    seen[record.class_label].insert(record.verbs_selected.begin(),
                                    record.verbs_selected.end());
  }
  std::map<std::string, std::size_t> out;
  for (const auto& [label, verbs] : seen) out.emplace(label, verbs.size());
  return out;
}

std::vector<std::int64_t> verb_counts(std::span<const AnnotationRecord> records,
                                      std::size_t vocab_size) {
  std::vector<std::int64_t> counts(vocab_size, 0);
  for (const auto& record : records) {
    for (VerbIndex j : record.verbs_selected) {
      if (j >= vocab_size) {
        throw InputError("verb index " + std::to_string(j) +
                         " outside vocabulary of size " +
                         std::to_string(vocab_size));
      }
      ++counts[j];
    }
  }
  return counts;
}

CorrelationReport r_squared(std::span<const double> x, std::span<const double> y,
                            std::string x_name, std::string y_name) {
  if (x.size() != y.size()) {
    throw InputError("r_squared: sample lengths differ (" +
                     std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw InputError("r_squared: need at least 2 samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw InputError("zero variance");
  return {std::move(x_name), std::move(y_name),
          std::min(1.0, (sxy * sxy) / (sxx * syy)), x.size()};
}

}  // namespace verbdist
