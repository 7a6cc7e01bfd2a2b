#include "verbdist/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "verbdist/error.hpp"

namespace verbdist {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Stable -[y log s(z) + (1-y) log(1-s(z))].
double bce_from_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

struct ForwardCache {
  std::vector<MatrixXd> activations;  // input, then each hidden activation
  MatrixXd logits;                    // last layer pre-activation
  MatrixXd outputs;
};

ForwardCache run_forward(const ModelParameters& params, const MatrixXd& x) {
  if (x.cols() != params.input_dim()) {
    throw InputError("feature dimension " + std::to_string(x.cols()) +
                     " does not match model input dimension " +
                     std::to_string(params.input_dim()));
  }
  ForwardCache cache;
  cache.activations.push_back(x);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const Layer& layer = params.layers[l];
    MatrixXd z = cache.activations.back() * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    if (l + 1 < params.layers.size()) {
      cache.activations.push_back(z.array().tanh().matrix());
    } else {
      cache.logits = std::move(z);
    }
  }
  if (params.output_activation == OutputActivation::kBoundedUnit) {
    cache.outputs = cache.logits.unaryExpr(&sigmoid);
  } else {
    cache.outputs = cache.logits;
  }
  return cache;
}

void check_targets(const ModelParameters& params, const MatrixXd& features,
                   const MatrixXd& targets) {
  if (features.rows() != targets.rows()) {
    throw InputError("feature rows (" + std::to_string(features.rows()) +
                     ") and target rows (" + std::to_string(targets.rows()) +
                     ") differ");
  }
  if (targets.cols() != params.output_dim()) {
    throw InputError("target dimension " + std::to_string(targets.cols()) +
                     " does not match model output dimension " +
                     std::to_string(params.output_dim()));
  }
  if (features.rows() == 0) throw InputError("empty batch");
}

void check_one_hot(const MatrixXd& targets) {
  for (Index r = 0; r < targets.rows(); ++r) {
    int ones = 0;
    for (Index c = 0; c < targets.cols(); ++c) {
      const double v = targets(r, c);
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        ones = -1;
        break;
      }
    }
    if (ones != 1) {
      throw InputError("target row " + std::to_string(r) +
                       " is not one-hot (logistic loss requires one-hot "
                       "targets)");
    }
  }
}

void check_same_shape(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InputError("output shape " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " does not match target shape " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

// d(data loss)/d(logits) for the whole batch.
MatrixXd logit_gradient(const ModelParameters& params, const ForwardCache& cache,
                        const MatrixXd& targets, LossKind loss) {
  const double batch = static_cast<double>(targets.rows());
  if (loss == LossKind::kLogisticOneHot) {
    // Sigmoid + cross-entropy collapses to (output - target).
    return (cache.outputs - targets) /
           (batch * static_cast<double>(targets.cols()));
  }
  MatrixXd d_out = MatrixXd::Zero(targets.rows(), targets.cols());
  for (Index r = 0; r < targets.rows(); ++r) {
    const VectorXd residual = (cache.outputs.row(r) - targets.row(r)).transpose();
    const double norm = residual.norm();
    if (norm < kEuclideanNormGuard) continue;
    d_out.row(r) = residual.transpose() / (norm * batch);
  }
  if (params.output_activation == OutputActivation::kBoundedUnit) {
    d_out.array() *= cache.outputs.array() * (1.0 - cache.outputs.array());
  }
  return d_out;
}

void check_loss_pairing(const ModelParameters& params, LossKind loss) {
  if (loss == LossKind::kLogisticOneHot &&
      params.output_activation != OutputActivation::kBoundedUnit) {
    throw ConfigError(
        "logistic loss requires a bounded-unit (sigmoid) output activation");
  }
}

}  // namespace

std::string to_string(Architecture a) {
  return a == Architecture::kLinear ? "linear" : "one-hidden";
}
std::string to_string(OutputActivation a) {
  return a == OutputActivation::kBoundedUnit ? "bounded-unit" : "linear-clamped";
}
std::string to_string(LossKind l) {
  return l == LossKind::kEuclidean ? "euclidean" : "logistic-onehot";
}

Architecture parse_architecture(const std::string& s) {
  if (s == "linear") return Architecture::kLinear;
  if (s == "one-hidden") return Architecture::kOneHidden;
  throw ConfigError("unknown architecture '" + s + "'");
}

OutputActivation parse_output_activation(const std::string& s) {
  if (s == "bounded-unit") return OutputActivation::kBoundedUnit;
  if (s == "linear-clamped") return OutputActivation::kLinearClamped;
  throw ConfigError("unknown output activation '" + s + "'");
}

LossKind parse_loss(const std::string& s) {
  if (s == "euclidean") return LossKind::kEuclidean;
  if (s == "logistic-onehot" || s == "logistic_onehot") {
    return LossKind::kLogisticOneHot;
  }
  throw ConfigError("unknown loss '" + s + "'");
}

OutputActivation activation_for(LossKind loss) {
  return loss == LossKind::kLogisticOneHot ? OutputActivation::kBoundedUnit
                                           : OutputActivation::kLinearClamped;
}

ModelShape ModelParameters::shape() const {
  ModelShape s;
  s.architecture = architecture;
  s.output_activation = output_activation;
  s.input_dim = input_dim();
  s.output_dim = output_dim();
  s.hidden_units = layers.size() > 1 ? layers.front().weights.rows() : 0;
  return s;
}

Index ModelParameters::parameter_count() const {
  Index n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

VectorXd ModelParameters::flatten() const {
  VectorXd flat(parameter_count());
  Index pos = 0;
  for (const auto& layer : layers) {
    flat.segment(pos, layer.weights.size()) =
        Eigen::Map<const VectorXd>(layer.weights.data(), layer.weights.size());
    pos += layer.weights.size();
    flat.segment(pos, layer.bias.size()) = layer.bias;
    pos += layer.bias.size();
  }
  return flat;
}

void ModelParameters::assign(const VectorXd& flat) {
  if (flat.size() != parameter_count()) {
    throw InputError("flat parameter vector has " + std::to_string(flat.size()) +
                     " entries, model has " + std::to_string(parameter_count()));
  }
  Index pos = 0;
  for (auto& layer : layers) {
    Eigen::Map<VectorXd>(layer.weights.data(), layer.weights.size()) =
        flat.segment(pos, layer.weights.size());
    pos += layer.weights.size();
    layer.bias = flat.segment(pos, layer.bias.size());
    pos += layer.bias.size();
  }
}

bool ModelParameters::all_finite() const {
  return std::all_of(layers.begin(), layers.end(), [](const Layer& l) {
    return l.weights.allFinite() && l.bias.allFinite();
  });
}

ModelParameters zero_parameters(const ModelShape& shape) {
  if (shape.input_dim <= 0 || shape.output_dim <= 0) {
    throw ConfigError("model dimensions must be positive");
  }
  ModelParameters p;
  p.architecture = shape.architecture;
  p.output_activation = shape.output_activation;
  if (shape.architecture == Architecture::kLinear) {
    p.layers.push_back({MatrixXd::Zero(shape.output_dim, shape.input_dim),
                        VectorXd::Zero(shape.output_dim)});
  } else {
    if (shape.hidden_units <= 0) {
      throw ConfigError("one-hidden architecture needs hidden_units > 0");
    }
    p.layers.push_back({MatrixXd::Zero(shape.hidden_units, shape.input_dim),
                        VectorXd::Zero(shape.hidden_units)});
    p.layers.push_back({MatrixXd::Zero(shape.output_dim, shape.hidden_units),
                        VectorXd::Zero(shape.output_dim)});
  }
  return p;
}

ModelParameters initialize(const ModelShape& shape, std::uint64_t seed) {
  ModelParameters p = zero_parameters(shape);
  std::mt19937_64 rng(seed);
  for (auto& layer : p.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weights.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Index c = 0; c < layer.weights.cols(); ++c) {
      for (Index r = 0; r < layer.weights.rows(); ++r) layer.weights(r, c) = dist(rng);
    }
  }
  return p;
}

double TrainConfig::learning_rate_at(int epoch) const {
  double lr = learning_rate;
  for (int step : lr_step_epochs) {
    if (epoch >= step) lr /= 10.0;
  }
  return lr;
}

void validate(const TrainConfig& config) {
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    throw ConfigError("learning rate must be a finite non-negative number");
  }
  if (config.epochs <= 0) throw ConfigError("epochs must be positive");
  if (config.batch_size <= 0) throw ConfigError("batch size must be positive");
  if (!(config.momentum >= 0.0 && config.momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0,1)");
  }
  if (!(config.weight_decay >= 0.0) || !std::isfinite(config.weight_decay)) {
    throw ConfigError("weight decay must be a finite non-negative number");
  }
  if (config.architecture == Architecture::kOneHidden && config.hidden_units <= 0) {
    throw ConfigError("one-hidden architecture needs hidden_units > 0");
  }
}

VectorXd forward(const ModelParameters& params, const VectorXd& x) {
  return run_forward(params, x.transpose()).outputs.row(0).transpose();
}

MatrixXd forward_batch(const ModelParameters& params, const MatrixXd& features) {
  return run_forward(params, features).outputs;
}

double loss_logistic_onehot(const MatrixXd& outputs, const MatrixXd& targets) {
  check_same_shape(outputs, targets);
  if (outputs.rows() == 0) throw InputError("empty batch");
  check_one_hot(targets);
  double total = 0.0;
  for (Index r = 0; r < outputs.rows(); ++r) {
    for (Index c = 0; c < outputs.cols(); ++c) {
      const double o = outputs(r, c);
      if (!(o > 0.0 && o < 1.0)) {
        throw InputError(
            "logistic loss requires outputs strictly inside (0,1); got " +
            std::to_string(o) + " at row " + std::to_string(r) + ", verb " +
            std::to_string(c));
      }
      const double y = targets(r, c);
      total -= y * std::log(o) + (1.0 - y) * std::log1p(-o);
    }
  }
  return total / static_cast<double>(outputs.rows() * outputs.cols());
}

double loss_logistic_onehot(const VectorXd& output, const VectorXd& target) {
  return loss_logistic_onehot(MatrixXd(output.transpose()),
                              MatrixXd(target.transpose()));
}

double loss_euclidean(const MatrixXd& outputs, const MatrixXd& targets) {
  check_same_shape(outputs, targets);
  if (outputs.rows() == 0) throw InputError("empty batch");
  return (targets - outputs).rowwise().norm().mean();
}

double loss_euclidean(const VectorXd& output, const VectorXd& target) {
  return loss_euclidean(MatrixXd(output.transpose()), MatrixXd(target.transpose()));
}

double batch_loss(const ModelParameters& params, const MatrixXd& features,
                  const MatrixXd& targets, LossKind loss) {
  check_targets(params, features, targets);
  check_loss_pairing(params, loss);
  const ForwardCache cache = run_forward(params, features);
  if (loss == LossKind::kEuclidean) return loss_euclidean(cache.outputs, targets);
  double total = 0.0;
  for (Index r = 0; r < targets.rows(); ++r) {
    for (Index c = 0; c < targets.cols(); ++c) {
      total += bce_from_logit(cache.logits(r, c), targets(r, c));
    }
  }
  return total / static_cast<double>(targets.size());
}

double objective(const ModelParameters& params, const MatrixXd& features,
                 const MatrixXd& targets, const TrainConfig& config) {
  const double data = batch_loss(params, features, targets, config.loss);
  return data + 0.5 * config.weight_decay * params.flatten().squaredNorm();
}

ModelParameters gradient(const ModelParameters& params, const MatrixXd& features,
                         const MatrixXd& targets, const TrainConfig& config) {
  check_targets(params, features, targets);
  check_loss_pairing(params, config.loss);
  const ForwardCache cache = run_forward(params, features);

  ModelParameters grad = params;
  MatrixXd delta = logit_gradient(params, cache, targets, config.loss);
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const MatrixXd& input = cache.activations[l];
    grad.layers[l].weights = delta.transpose() * input +
                             config.weight_decay * params.layers[l].weights;
    grad.layers[l].bias = delta.colwise().sum().transpose() +
                          config.weight_decay * params.layers[l].bias;
    if (l > 0) {
      delta = (delta * params.layers[l].weights).array() *
              (1.0 - input.array().square());
    }
  }
  return grad;
}

TrainResult train(const MatrixXd& features, const MatrixXd& targets,
                  const TrainConfig& config) {
  validate(config);
  ModelShape shape;
  shape.architecture = config.architecture;
  shape.output_activation = activation_for(config.loss);
  shape.input_dim = features.cols();
  shape.hidden_units = config.hidden_units;
  shape.output_dim = targets.cols();
  return train(features, targets, config, initialize(shape, config.seed));
}

TrainResult train(const MatrixXd& features, const MatrixXd& targets,
                  const TrainConfig& config, ModelParameters initial) {
  validate(config);
  check_targets(initial, features, targets);
  check_loss_pairing(initial, config.loss);
  if (config.loss == LossKind::kLogisticOneHot) check_one_hot(targets);
  if (!features.allFinite() || !targets.allFinite()) {
    throw InputError("training data contains non-finite values");
  }

  // Offset keeps the shuffle stream distinct from the initialization stream.
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const Index n = features.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  TrainResult result{std::move(initial), {}};
  ModelParameters& params = result.params;
  std::vector<Layer> velocity;
  for (const auto& layer : params.layers) {
    velocity.push_back({MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                        VectorXd::Zero(layer.bias.size())});
  }

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate_at(epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_total = 0.0;
    int batch_index = 0;
    for (Index start = 0; start < n; start += config.batch_size, ++batch_index) {
      const Index size = std::min<Index>(config.batch_size, n - start);
      MatrixXd x(size, features.cols());
      MatrixXd y(size, targets.cols());
      for (Index i = 0; i < size; ++i) {
        const Index src = order[static_cast<std::size_t>(start + i)];
        x.row(i) = features.row(src);
        y.row(i) = targets.row(src);
      }
      const double loss = batch_loss(params, x, y, config.loss);
      if (!std::isfinite(loss)) {
        throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(batch_index));
      }
      epoch_total += loss * static_cast<double>(size);

      const ModelParameters grad = gradient(params, x, y, config);
      for (std::size_t l = 0; l < params.layers.size(); ++l) {
        velocity[l].weights =
            config.momentum * velocity[l].weights - lr * grad.layers[l].weights;
        velocity[l].bias =
            config.momentum * velocity[l].bias - lr * grad.layers[l].bias;
        params.layers[l].weights += velocity[l].weights;
        params.layers[l].bias += velocity[l].bias;
      }
      if (!params.all_finite()) {
        throw NumericalError("non-finite parameters after update at epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(batch_index));
      }
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(n));
  }
  return result;
}

MatrixXd clamp_unit(const MatrixXd& values) {
  return values.cwiseMax(0.0).cwiseMin(1.0);
}

MatrixXd predict_matrix(const ModelParameters& params, const MatrixXd& features) {
  return clamp_unit(forward_batch(params, features));
}

}  // namespace verbdist
