#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace verbdist {

enum class Architecture { kLinear, kOneHidden };

// kBoundedUnit squashes outputs through a logistic sigmoid into (0,1).
// kLinearClamped leaves outputs raw during training; predict_matrix clamps
// them to [0,1].
enum class OutputActivation { kBoundedUnit, kLinearClamped };

enum class LossKind { kEuclidean, kLogisticOneHot };

std::string to_string(Architecture a);
std::string to_string(OutputActivation a);
std::string to_string(LossKind l);
Architecture parse_architecture(const std::string& s);
OutputActivation parse_output_activation(const std::string& s);
LossKind parse_loss(const std::string& s);

// Each loss is paired with one output activation: bounded-unit for the
// logistic loss, linear for the Euclidean loss.
OutputActivation activation_for(LossKind loss);

struct Layer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

struct ModelShape {
  Architecture architecture = Architecture::kLinear;
  OutputActivation output_activation = OutputActivation::kLinearClamped;
  Eigen::Index input_dim = 0;
  Eigen::Index hidden_units = 0;  // ignored for kLinear
  Eigen::Index output_dim = 0;
};

// Weights of a linear model or a one-hidden-layer (tanh) network. Gradients
// use the same structure.
struct ModelParameters {
  Architecture architecture = Architecture::kLinear;
  OutputActivation output_activation = OutputActivation::kLinearClamped;
  std::vector<Layer> layers;

  ModelShape shape() const;
  Eigen::Index input_dim() const { return layers.front().weights.cols(); }
  Eigen::Index output_dim() const { return layers.back().weights.rows(); }
  Eigen::Index parameter_count() const;

  // Layer by layer: weights (column-major), then bias.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);

  bool all_finite() const;
};

// All-zero parameters of the given shape.
ModelParameters zero_parameters(const ModelShape& shape);

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
ModelParameters initialize(const ModelShape& shape, std::uint64_t seed);

struct TrainConfig {
  LossKind loss = LossKind::kEuclidean;
  double learning_rate = 1e-3;
  int epochs = 10;
  int batch_size = 128;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  std::uint64_t seed = 0;
  // Learning rate is divided by 10 at the start of each listed epoch
  // (0-based).
  std::vector<int> lr_step_epochs;
  Architecture architecture = Architecture::kLinear;
  int hidden_units = 0;

  double learning_rate_at(int epoch) const;
};

// Throws ConfigError for out-of-range fields.
void validate(const TrainConfig& config);

// Forward pass for one feature vector. Throws InputError on a dimension
// mismatch.
Eigen::VectorXd forward(const ModelParameters& params, const Eigen::VectorXd& x);

// Forward pass for a batch with one sample per row.
Eigen::MatrixXd forward_batch(const ModelParameters& params,
                              const Eigen::MatrixXd& features);

// Binary cross-entropy per vocabulary entry, averaged over entries and over
// the batch (rows). Outputs must lie strictly inside (0,1) and every target
// row must be one-hot; otherwise InputError.
double loss_logistic_onehot(const Eigen::MatrixXd& outputs,
                            const Eigen::MatrixXd& targets);
double loss_logistic_onehot(const Eigen::VectorXd& output,
                            const Eigen::VectorXd& target);

// Mean over rows of the Euclidean distance between output and target.
double loss_euclidean(const Eigen::MatrixXd& outputs,
                      const Eigen::MatrixXd& targets);
double loss_euclidean(const Eigen::VectorXd& output,
                      const Eigen::VectorXd& target);

// Per-sample Euclidean residuals below this norm contribute zero gradient.
inline constexpr double kEuclideanNormGuard = 1e-12;

// Data loss of the configured kind, computed from pre-activation values for
// numerical stability. Does not include weight decay.
double batch_loss(const ModelParameters& params, const Eigen::MatrixXd& features,
                  const Eigen::MatrixXd& targets, LossKind loss);

// batch_loss + weight_decay / 2 * |theta|^2. The function whose exact
// derivative `gradient` returns.
double objective(const ModelParameters& params, const Eigen::MatrixXd& features,
                 const Eigen::MatrixXd& targets, const TrainConfig& config);

// Analytic gradient of `objective` with respect to every parameter.
ModelParameters gradient(const ModelParameters& params,
                         const Eigen::MatrixXd& features,
                         const Eigen::MatrixXd& targets,
                         const TrainConfig& config);

struct TrainResult {
  ModelParameters params;
  std::vector<double> epoch_loss;  // mean data loss over each epoch's batches
};

// Momentum SGD from a seeded initialization. Rows of `features` and `targets`
// are paired samples. Throws NumericalError naming epoch and batch when the
// loss or parameters become non-finite.
TrainResult train(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                  const TrainConfig& config);

// Same as above, starting from `initial` instead of a fresh initialization.
TrainResult train(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                  const TrainConfig& config, ModelParameters initial);

// Forward outputs clamped elementwise to [0,1].
Eigen::MatrixXd predict_matrix(const ModelParameters& params,
                               const Eigen::MatrixXd& features);

// Elementwise clamp to [0,1].
Eigen::MatrixXd clamp_unit(const Eigen::MatrixXd& values);

}  // namespace verbdist
