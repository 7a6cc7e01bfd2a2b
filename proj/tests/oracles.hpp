#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library code paths it is used to check.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "verbdist/annotations.hpp"
#include "verbdist/model.hpp"

namespace verbdist::oracle {

// Per-verb selection counts and distinct workers for one video, by scanning
// the whole record list.
inline std::vector<double> tally(const std::vector<AnnotationRecord>& records,
                                 const std::string& video_id, std::size_t vocab_size) {
  std::vector<int> counts(vocab_size, 0);
  std::set<std::string> workers;
  for (const auto& r : records) {
    if (r.video_id != video_id) continue;
    workers.insert(r.worker_id);
    for (std::size_t j = 0; j < vocab_size; ++j) {
      if (r.verbs_selected.count(j) != 0) ++counts[j];
    }
  }
  std::vector<double> p(vocab_size, 0.0);
  for (std::size_t j = 0; j < vocab_size; ++j) {
    p[j] = static_cast<double>(counts[j]) / static_cast<double>(workers.size());
  }
  return p;
}

// Double loop over every ordered pair of distinct verbs in every selection.
inline std::vector<std::vector<long>> pair_counts(
    const std::vector<std::set<std::size_t>>& selections, std::size_t vocab_size) {
  std::vector<std::vector<long>> c(vocab_size, std::vector<long>(vocab_size, 0));
  for (const auto& s : selections) {
    for (std::size_t i = 0; i < vocab_size; ++i) {
      for (std::size_t j = 0; j < vocab_size; ++j) {
        if (i != j && s.count(i) != 0 && s.count(j) != 0) ++c[i][j];
      }
    }
  }
  return c;
}

// Plain-loop forward pass.
inline std::vector<double> forward(const ModelParameters& params,
                                   const std::vector<double>& x) {
  std::vector<double> a = x;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const Layer& layer = params.layers[l];
    std::vector<double> z(static_cast<std::size_t>(layer.weights.rows()), 0.0);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      double sum = layer.bias[r];
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        sum += layer.weights(r, c) * a[static_cast<std::size_t>(c)];
      }
      z[static_cast<std::size_t>(r)] = sum;
    }
    const bool last = l + 1 == params.layers.size();
    for (double& v : z) {
      if (!last) {
        v = std::tanh(v);
      } else if (params.output_activation == OutputActivation::kBoundedUnit) {
        v = 1.0 / (1.0 + std::exp(-v));
      }
    }
    a = std::move(z);
  }
  return a;
}

// Central differences of f at theta.
inline Eigen::VectorXd central_difference(
    const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd theta,
    double step) {
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + step;
    const double up = f(theta);
    theta[i] = saved - step;
    const double down = f(theta);
    theta[i] = saved;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double denom = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / denom;
}

// P(X <= lo or X >= hi) for X ~ Binomial(n, p), by direct summation.
inline double binomial_outside(int n, double p, int lo, int hi) {
  double total = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (k > lo && k < hi) continue;
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                           std::lgamma(n - k + 1.0) + k * std::log(p) +
                           (n - k) * std::log1p(-p);
    total += std::exp(log_pmf);
  }
  return total;
}

// Squared Pearson correlation straight from the textbook formula with
// separate passes.
inline double pearson_r2(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const double cov = sxy - sx * sy / n;
  return cov * cov / ((sxx - sx * sx / n) * (syy - sy * sy / n));
}

}  // namespace verbdist::oracle
