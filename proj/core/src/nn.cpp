#include "vsg/nn.hpp"

#include <cmath>

#include "vsg/error.hpp"

namespace vsg::nn {

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto* p : entries_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void ParamStore::zero_grads() {
  for (auto* p : entries_) p->grad.setZero(p->value.rows(), p->value.cols());
}

Parameter* ParamStore::find(const std::string& name) const {
  for (auto* p : entries_) {
    if (p->name == name) return p;
  }
  return nullptr;
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_backward(const Matrix& dy, const Matrix& pre_activation) {
  return (pre_activation.array() > 0.0).select(dy, 0.0);
}

Matrix sigmoid(const Matrix& x) {
  return x.unaryExpr([](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

Matrix sigmoid_backward(const Matrix& dy, const Matrix& y) {
  return dy.array() * y.array() * (1.0 - y.array());
}

DropoutOutput dropout(const Matrix& x, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  DropoutOutput out;
  out.mask = Matrix::Ones(x.rows(), x.cols());
  if (mode == Mode::kEval || rate == 0.0) {
    out.y = x;
    return out;
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  // Column-major traversal fixes the order in which the generator is consumed.
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      if (uniform(rng) < rate) out.mask(r, c) = 0.0;
    }
  }
  out.y = x.cwiseProduct(out.mask) / (1.0 - rate);
  return out;
}

Matrix dropout_backward(const Matrix& dy, const Matrix& mask, double rate) {
  return dy.cwiseProduct(mask) / (1.0 - rate);
}

Mlp::Mlp(std::string name, std::vector<std::size_t> layer_sizes, Rng& rng)
    : Mlp(zeros(std::move(name), std::move(layer_sizes))) {
  for (auto& w : weights_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.value.cols()));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (Eigen::Index c = 0; c < w.value.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.value.rows(); ++r) w.value(r, c) = uniform(rng);
    }
  }
}

Mlp Mlp::zeros(std::string name, std::vector<std::size_t> layer_sizes) {
  if (layer_sizes.size() < 2) {
    throw DimensionError("MLP '" + name + "' needs at least input and output sizes");
  }
  Mlp m;
  m.name_ = std::move(name);
  m.sizes_ = std::move(layer_sizes);
  for (std::size_t l = 0; l + 1 < m.sizes_.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(m.sizes_[l]);
    const auto out = static_cast<Eigen::Index>(m.sizes_[l + 1]);
    if (in == 0 || out == 0) throw DimensionError("MLP '" + m.name_ + "' has a zero-width layer");
    const std::string prefix = m.name_ + "." + std::to_string(l);
    m.weights_.emplace_back(prefix + ".weight", Matrix::Zero(out, in));
    m.biases_.emplace_back(prefix + ".bias", Matrix::Zero(out, 1));
  }
  return m;
}

Matrix Mlp::forward(const Matrix& x, MlpCache* cache) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim()) {
    throw DimensionError("MLP '" + name_ + "' expects input width " +
                         std::to_string(input_dim()) + ", got " + std::to_string(x.cols()));
  }
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->pre_activations.clear();
  }
  Matrix h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix pre = h * weights_[l].value.transpose();
    pre.rowwise() += biases_[l].value.col(0).transpose();
    Matrix next = (l + 1 < weights_.size()) ? relu(pre) : pre;
    if (cache != nullptr) {
      cache->inputs.push_back(std::move(h));
      cache->pre_activations.push_back(std::move(pre));
    }
    h = std::move(next);
  }
  return h;
}

Vector Mlp::forward(const Vector& x) const {
  return forward(Matrix(x.transpose())).row(0).transpose();
}

Matrix Mlp::backward(const MlpCache& cache, const Matrix& dy) {
  if (cache.inputs.size() != weights_.size()) {
    throw DimensionError("MLP '" + name_ + "': cache does not match layer count");
  }
  if (dy.cols() != static_cast<Eigen::Index>(output_dim()) ||
      dy.rows() != cache.pre_activations.back().rows()) {
    throw DimensionError("MLP '" + name_ + "': upstream gradient shape mismatch");
  }
  Matrix delta = dy;
  for (std::size_t l = weights_.size(); l-- > 0;) {
    if (l + 1 < weights_.size()) delta = relu_backward(delta, cache.pre_activations[l]);
    weights_[l].grad.noalias() += delta.transpose() * cache.inputs[l];
    biases_[l].grad.col(0) += delta.colwise().sum().transpose();
    delta = delta * weights_[l].value;
  }
  return delta;
}

void Mlp::register_parameters(ParamStore& store) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    store.add(weights_[l]);
    store.add(biases_[l]);
  }
}

void Adam::step(const ParamStore& store) {
  const auto entries = store.entries();
  for (const auto* p : entries) {
    if (!p->grad.allFinite()) {
      throw TrainingError("non-finite gradient in parameter '" + p->name + "'");
    }
  }
  if (m_.size() != entries.size()) {
    m_.clear();
    v_.clear();
    for (const auto* p : entries) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto* p = entries[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p->grad;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * p->grad.cwiseProduct(p->grad);
    p->value.array() -= config_.learning_rate * (m_[i].array() / c1) /
                        ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
}

}  // namespace vsg::nn
