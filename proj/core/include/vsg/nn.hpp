#pragma once

// Small dense neural-network kernel: MLPs, activations, dropout, parameter
// registry and Adam. Backward passes are hand-derived per op and accumulate
// into gradient buffers; rows of every activation matrix are samples.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vsg::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

enum class Mode { kTrain, kEval };

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}
};

// Non-owning, ordered view over the parameters of a model. Order is stable
// for a given model layout, which is what optimizer state is keyed on.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t rng_seed = 0) : rng_seed_(rng_seed) {}

  void add(Parameter& p) { entries_.push_back(&p); }
  std::span<Parameter* const> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t num_scalars() const;

  void zero_grads();
  Parameter* find(const std::string& name) const;

  std::uint64_t rng_seed() const { return rng_seed_; }

 private:
  std::vector<Parameter*> entries_;
  std::uint64_t rng_seed_ = 0;
};

Matrix relu(const Matrix& x);
// dy masked by x > 0, where x is the pre-activation.
Matrix relu_backward(const Matrix& dy, const Matrix& pre_activation);

Matrix sigmoid(const Matrix& x);
// dy * y * (1 - y), where y = sigmoid(x).
Matrix sigmoid_backward(const Matrix& dy, const Matrix& y);

struct DropoutOutput {
  Matrix y;
  Matrix mask;  // 1 for kept entries, 0 for dropped
};

// Inverted dropout. Throws ConfigError unless 0 <= rate < 1.
DropoutOutput dropout(const Matrix& x, double rate, Mode mode, Rng& rng);
Matrix dropout_backward(const Matrix& dy, const Matrix& mask, double rate);

struct MlpCache {
  std::vector<Matrix> inputs;           // input of each layer
  std::vector<Matrix> pre_activations;  // affine output of each layer
};

// Fully connected network, ReLU on hidden layers and identity on the output.
class Mlp {
 public:
  Mlp() = default;
  // Kaiming-uniform weights, zero biases.
  Mlp(std::string name, std::vector<std::size_t> layer_sizes, Rng& rng);
  // All parameters zero.
  static Mlp zeros(std::string name, std::vector<std::size_t> layer_sizes);

  const std::string& name() const { return name_; }
  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::size_t num_layers() const { return weights_.size(); }

  Parameter& weight(std::size_t layer) { return weights_.at(layer); }
  Parameter& bias(std::size_t layer) { return biases_.at(layer); }
  const Parameter& weight(std::size_t layer) const { return weights_.at(layer); }
  const Parameter& bias(std::size_t layer) const { return biases_.at(layer); }

  // x: N x input_dim. Pure; fills `cache` when given.
  Matrix forward(const Matrix& x, MlpCache* cache = nullptr) const;
  Vector forward(const Vector& x) const;

  // Accumulates parameter gradients and returns dL/dx.
  Matrix backward(const MlpCache& cache, const Matrix& dy);

  void register_parameters(ParamStore& store);

 private:
  std::string name_;
  std::vector<std::size_t> sizes_;
  std::vector<Parameter> weights_;  // out x in
  std::vector<Parameter> biases_;   // out x 1
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // Bias-corrected Adam update. Throws TrainingError naming the first
  // parameter whose gradient is not finite; nothing is updated in that case.
  void step(const ParamStore& store);
  long steps() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long t_ = 0;
};

}  // namespace vsg::nn
