#include "vsg/model.hpp"

#include "vsg/error.hpp"

namespace vsg {

const char* variability_name(Eigen::Index v) {
  switch (v) {
    case kPosition:
      return "position";
    case kState:
      return "state";
    case kInstance:
      return "instance";
    default:
      return "unknown";
  }
}

std::string to_string(GateMode mode) {
  return mode == GateMode::kScalar ? "scalar" : "elementwise";
}

GateMode gate_mode_from_string(const std::string& text) {
  if (text == "elementwise") return GateMode::kElementwise;
  if (text == "scalar") return GateMode::kScalar;
  throw ConfigError("unknown gate mode '" + text + "' (expected elementwise|scalar)");
}

namespace {

nn::Mlp make_mlp(std::string name, std::vector<std::size_t> sizes, nn::Rng* rng) {
  return rng != nullptr ? nn::Mlp(std::move(name), std::move(sizes), *rng)
                        : nn::Mlp::zeros(std::move(name), std::move(sizes));
}

template <typename CacheT>
const CacheT& train_cache(const ForwardCache& cache, const char* network) {
  const auto* typed = dynamic_cast<const CacheT*>(&cache);
  if (typed == nullptr) {
    throw UsageError(std::string(network) + ": cache was produced by a different network");
  }
  if (cache.mode != nn::Mode::kTrain) {
    throw UsageError(std::string(network) + ": backward requires a train-mode forward cache");
  }
  return *typed;
}

void check_input(const EmbeddedGraph& graph, const NetworkConfig& config) {
  if (static_cast<std::size_t>(graph.node_features.cols()) != config.input_dim) {
    throw DimensionError("network expects node features of width " +
                         std::to_string(config.input_dim) + ", got " +
                         std::to_string(graph.node_features.cols()));
  }
}

}  // namespace

MpConv::MpConv(const std::string& name, std::size_t feature_dim, std::size_t edge_dim,
               std::size_t hidden_dim, GateMode gate, nn::Rng* rng)
    : self_net_(make_mlp(name + ".self", {feature_dim, hidden_dim, feature_dim}, rng)),
      edge_net_(make_mlp(name + ".edge",
                         {edge_dim, hidden_dim, gate == GateMode::kScalar ? 1 : feature_dim},
                         rng)),
      gate_(gate) {}

MpConv::MpConv(nn::Mlp self_net, nn::Mlp edge_net, GateMode gate)
    : self_net_(std::move(self_net)), edge_net_(std::move(edge_net)), gate_(gate) {
  if (self_net_.output_dim() != self_net_.input_dim()) {
    throw DimensionError("MP-Conv self network must preserve the feature width");
  }
  const std::size_t gate_width = gate_ == GateMode::kScalar ? 1 : self_net_.input_dim();
  if (edge_net_.output_dim() != gate_width) {
    throw DimensionError("MP-Conv edge network output width must be " +
                         std::to_string(gate_width));
  }
}

nn::Matrix MpConv::forward(const nn::Matrix& z, std::span<const Edge> edges,
                           const nn::Matrix& edge_features, Cache* cache) const {
  const auto n = static_cast<std::size_t>(z.rows());
  if (static_cast<std::size_t>(z.cols()) != feature_dim()) {
    throw DimensionError("MP-Conv expects feature width " + std::to_string(feature_dim()) +
                         ", got " + std::to_string(z.cols()));
  }
  for (const auto& e : edges) {
    if (e.source >= n || e.target >= n) {
      throw GraphError("edge (" + std::to_string(e.source) + ", " + std::to_string(e.target) +
                       ") out of range for " + std::to_string(n) + " nodes");
    }
  }

  nn::Matrix out = self_net_.forward(z, cache != nullptr ? &cache->self : nullptr);
  nn::Matrix gates;
  if (!edges.empty()) {
    if (static_cast<std::size_t>(edge_features.rows()) != edges.size()) {
      throw DimensionError("edge feature rows do not match edge count");
    }
    gates = edge_net_.forward(edge_features, cache != nullptr ? &cache->edge : nullptr);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto s = static_cast<Eigen::Index>(edges[k].source);
      const auto t = static_cast<Eigen::Index>(edges[k].target);
      const auto row = static_cast<Eigen::Index>(k);
      if (gate_ == GateMode::kElementwise) {
        out.row(t) += z.row(s).cwiseProduct(gates.row(row));
      } else {
        out.row(t) += z.row(s) * gates(row, 0);
      }
    }
  }
  if (cache != nullptr) {
    cache->input = z;
    cache->gates = std::move(gates);
    cache->edges.assign(edges.begin(), edges.end());
  }
  return out;
}

nn::Matrix MpConv::backward(const Cache& cache, const nn::Matrix& dout) {
  if (dout.rows() != cache.input.rows() || dout.cols() != cache.input.cols()) {
    throw DimensionError("MP-Conv upstream gradient shape mismatch");
  }
  nn::Matrix dz = self_net_.backward(cache.self, dout);
  if (cache.edges.empty()) return dz;

  nn::Matrix dgates(cache.gates.rows(), cache.gates.cols());
  for (std::size_t k = 0; k < cache.edges.size(); ++k) {
    const auto s = static_cast<Eigen::Index>(cache.edges[k].source);
    const auto t = static_cast<Eigen::Index>(cache.edges[k].target);
    const auto row = static_cast<Eigen::Index>(k);
    if (gate_ == GateMode::kElementwise) {
      dz.row(s) += dout.row(t).cwiseProduct(cache.gates.row(row));
      dgates.row(row) = dout.row(t).cwiseProduct(cache.input.row(s));
    } else {
      dz.row(s) += dout.row(t) * cache.gates(row, 0);
      dgates(row, 0) = dout.row(t).dot(cache.input.row(s));
    }
  }
  edge_net_.backward(cache.edge, dgates);
  return dz;
}

void MpConv::register_parameters(nn::ParamStore& store) {
  self_net_.register_parameters(store);
  edge_net_.register_parameters(store);
}

DeltaVsgNetwork::DeltaVsgNetwork(const NetworkConfig& config, nn::Rng* rng)
    : config_(config),
      conv1_("conv1", config.input_dim, config.edge_dim(), config.hidden_dim, config.gate, rng),
      conv2_("conv2", config.input_dim, config.edge_dim(), config.hidden_dim, config.gate, rng),
      head_(make_mlp("head", {config.input_dim, config.hidden_dim, kNumVariabilities}, rng)) {
  config_.architecture = "delta_vsg";
}

ForwardPass DeltaVsgNetwork::forward(const EmbeddedGraph& graph, nn::Mode mode,
                                     nn::Rng& rng) const {
  check_input(graph, config_);
  auto cache = std::make_unique<Cache>();
  cache->mode = mode;
  const bool keep = mode == nn::Mode::kTrain;

  nn::Matrix h1 = conv1_.forward(graph.node_features, graph.edge_index, graph.edge_features,
                                 keep ? &cache->conv1 : nullptr);
  auto dropped = nn::dropout(nn::relu(h1), config_.dropout_rate, mode, rng);
  nn::Matrix h2 = conv2_.forward(dropped.y, graph.edge_index, graph.edge_features,
                                 keep ? &cache->conv2 : nullptr);
  nn::Matrix logits = head_.forward(h2, keep ? &cache->head : nullptr);

  ForwardPass out;
  out.probabilities = nn::sigmoid(logits);
  if (keep) {
    cache->conv1_out = std::move(h1);
    cache->dropout_mask = std::move(dropped.mask);
    cache->probabilities = out.probabilities;
  }
  out.cache = std::move(cache);
  return out;
}

void DeltaVsgNetwork::backward(const ForwardCache& base, const nn::Matrix& dprobabilities) {
  const auto& cache = train_cache<Cache>(base, "DeltaVSG");
  nn::Matrix dlogits = nn::sigmoid_backward(dprobabilities, cache.probabilities);
  nn::Matrix dh2 = head_.backward(cache.head, dlogits);
  nn::Matrix ddrop = conv2_.backward(cache.conv2, dh2);
  nn::Matrix drelu = nn::dropout_backward(ddrop, cache.dropout_mask, config_.dropout_rate);
  nn::Matrix dh1 = nn::relu_backward(drelu, cache.conv1_out);
  conv1_.backward(cache.conv1, dh1);
}

void DeltaVsgNetwork::register_parameters(nn::ParamStore& store) {
  conv1_.register_parameters(store);
  conv2_.register_parameters(store);
  head_.register_parameters(store);
}

MlpBaselineNetwork::MlpBaselineNetwork(const NetworkConfig& config, nn::Rng* rng)
    : config_(config),
      trunk_(make_mlp("trunk", {config.input_dim, config.hidden_dim, config.hidden_dim}, rng)),
      head_(make_mlp("head", {config.hidden_dim, config.hidden_dim, kNumVariabilities}, rng)) {
  config_.architecture = "mlp";
}

ForwardPass MlpBaselineNetwork::forward(const EmbeddedGraph& graph, nn::Mode mode,
                                        nn::Rng& rng) const {
  check_input(graph, config_);
  auto cache = std::make_unique<Cache>();
  cache->mode = mode;
  const bool keep = mode == nn::Mode::kTrain;

  nn::Matrix h = trunk_.forward(graph.node_features, keep ? &cache->trunk : nullptr);
  auto dropped = nn::dropout(nn::relu(h), config_.dropout_rate, mode, rng);
  nn::Matrix logits = head_.forward(dropped.y, keep ? &cache->head : nullptr);

  ForwardPass out;
  out.probabilities = nn::sigmoid(logits);
  if (keep) {
    cache->trunk_out = std::move(h);
    cache->dropout_mask = std::move(dropped.mask);
    cache->probabilities = out.probabilities;
  }
  out.cache = std::move(cache);
  return out;
}

void MlpBaselineNetwork::backward(const ForwardCache& base, const nn::Matrix& dprobabilities) {
  const auto& cache = train_cache<Cache>(base, "MLP baseline");
  nn::Matrix dlogits = nn::sigmoid_backward(dprobabilities, cache.probabilities);
  nn::Matrix ddrop = head_.backward(cache.head, dlogits);
  nn::Matrix drelu = nn::dropout_backward(ddrop, cache.dropout_mask, config_.dropout_rate);
  trunk_.backward(cache.trunk, nn::relu_backward(drelu, cache.trunk_out));
}

void MlpBaselineNetwork::register_parameters(nn::ParamStore& store) {
  trunk_.register_parameters(store);
  head_.register_parameters(store);
}

std::unique_ptr<VariabilityNetwork> make_network(const NetworkConfig& config, nn::Rng* rng) {
  if (config.input_dim == 0 || config.hidden_dim == 0) {
    throw ConfigError("network input and hidden dimensions must be positive");
  }
  if (!(config.dropout_rate >= 0.0 && config.dropout_rate < 1.0)) {
    throw ConfigError("dropout rate must be in [0, 1)");
  }
  if (config.architecture == "delta_vsg") return std::make_unique<DeltaVsgNetwork>(config, rng);
  if (config.architecture == "mlp") return std::make_unique<MlpBaselineNetwork>(config, rng);
  throw ConfigError("unknown architecture '" + config.architecture +
                    "' (expected delta_vsg|mlp)");
}

VsgModel::VsgModel(std::unique_ptr<VariabilityNetwork> network, Taxonomy taxonomy,
                   PcaModel pca, EdgeConfig edges)
    : network_(std::move(network)),
      taxonomy_(std::move(taxonomy)),
      pca_(std::move(pca)),
      edges_(edges) {
  if (network_ == nullptr) throw ConfigError("model requires a network");
  if (network_->config().input_dim != pca_.output_dim()) {
    throw DimensionError("network input width does not match PCA output dimension");
  }
  if (network_->config().num_relations != taxonomy_.num_relationships()) {
    throw DimensionError("network edge width does not match taxonomy relationships");
  }
}

VsgModel::VsgModel(const VsgModel& other)
    : network_(other.network_->clone()),
      taxonomy_(other.taxonomy_),
      pca_(other.pca_),
      edges_(other.edges_) {}

VsgModel& VsgModel::operator=(const VsgModel& other) {
  if (this != &other) {
    VsgModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

EmbeddedGraph VsgModel::embed(const SceneGraph& graph) const {
  if (graph.taxonomy_name() != taxonomy_.name()) {
    throw CheckpointError("scene '" + graph.scan_id() + "' uses taxonomy '" +
                          graph.taxonomy_name() + "' but the model was trained on '" +
                          taxonomy_.name() + "'");
  }
  return vsg::embed(graph, taxonomy_, pca_, edges_);
}

VariabilityPrediction VsgModel::predict(const SceneGraph& graph) const {
  return predict(embed(graph));
}

VariabilityPrediction VsgModel::predict(const EmbeddedGraph& graph) const {
  nn::Rng unused(0);
  auto pass = network_->forward(graph, nn::Mode::kEval, unused);
  return VariabilityPrediction{graph.node_ids, std::move(pass.probabilities)};
}

}  // namespace vsg
