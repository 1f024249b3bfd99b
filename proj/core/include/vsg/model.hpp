#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vsg/embedding.hpp"
#include "vsg/nn.hpp"
#include "vsg/scene_graph.hpp"
#include "vsg/taxonomy.hpp"

namespace vsg {

// Output column order of every variability network.
enum Variability : Eigen::Index { kPosition = 0, kState = 1, kInstance = 2 };
inline constexpr Eigen::Index kNumVariabilities = 3;
const char* variability_name(Eigen::Index v);

// How the edge network output gates a neighbour's features.
enum class GateMode { kElementwise, kScalar };
std::string to_string(GateMode mode);
GateMode gate_mode_from_string(const std::string& text);

// Message-passing convolution:
//   z'_i = f(z_i) + sum_{(j,i) in E} z_j * h(q_ji)
// Messages flow along stored edge direction (source -> target). With
// kElementwise the product is Hadamard and h outputs feature_dim values;
// with kScalar h outputs a single gate per edge.
class MpConv {
 public:
  struct Cache {
    nn::Matrix input;
    nn::MlpCache self;
    nn::MlpCache edge;
    nn::Matrix gates;  // E x (feature_dim | 1)
    std::vector<Edge> edges;
  };

  MpConv() = default;
  MpConv(const std::string& name, std::size_t feature_dim, std::size_t edge_dim,
         std::size_t hidden_dim, GateMode gate, nn::Rng* rng);
  MpConv(nn::Mlp self_net, nn::Mlp edge_net, GateMode gate);

  std::size_t feature_dim() const { return self_net_.input_dim(); }
  std::size_t edge_dim() const { return edge_net_.input_dim(); }
  GateMode gate() const { return gate_; }

  nn::Mlp& self_net() { return self_net_; }
  nn::Mlp& edge_net() { return edge_net_; }
  const nn::Mlp& self_net() const { return self_net_; }
  const nn::Mlp& edge_net() const { return edge_net_; }

  // Throws GraphError on out-of-range edge endpoints, DimensionError on
  // shape mismatch.
  nn::Matrix forward(const nn::Matrix& z, std::span<const Edge> edges,
                     const nn::Matrix& edge_features, Cache* cache = nullptr) const;
  // Accumulates into f and h gradients; returns dL/dz.
  nn::Matrix backward(const Cache& cache, const nn::Matrix& dout);

  void register_parameters(nn::ParamStore& store);

 private:
  nn::Mlp self_net_;
  nn::Mlp edge_net_;
  GateMode gate_ = GateMode::kElementwise;
};

struct NetworkConfig {
  std::string architecture = "delta_vsg";  // delta_vsg | mlp
  std::size_t input_dim = 0;               // d_v
  std::size_t hidden_dim = 64;
  std::size_t num_relations = 0;           // |R|
  double dropout_rate = 0.2;
  GateMode gate = GateMode::kElementwise;

  std::size_t edge_dim() const { return num_relations + 3; }
};

struct ForwardCache {
  virtual ~ForwardCache() = default;
  nn::Mode mode = nn::Mode::kEval;
};

struct ForwardPass {
  nn::Matrix probabilities;  // N x 3, columns ordered by Variability
  std::unique_ptr<ForwardCache> cache;
};

class VariabilityNetwork {
 public:
  virtual ~VariabilityNetwork() = default;

  virtual const NetworkConfig& config() const = 0;
  virtual ForwardPass forward(const EmbeddedGraph& graph, nn::Mode mode,
                              nn::Rng& rng) const = 0;
  // Requires a train-mode cache from this network; throws UsageError otherwise.
  virtual void backward(const ForwardCache& cache, const nn::Matrix& dprobabilities) = 0;
  virtual void register_parameters(nn::ParamStore& store) = 0;
  virtual std::unique_ptr<VariabilityNetwork> clone() const = 0;

  nn::ParamStore parameters(std::uint64_t rng_seed = 0) {
    nn::ParamStore store(rng_seed);
    register_parameters(store);
    return store;
  }
};

// Two MP-Conv layers with ReLU and dropout between them, followed by a
// shared MLP head producing three independent sigmoid outputs.
class DeltaVsgNetwork final : public VariabilityNetwork {
 public:
  struct Cache : ForwardCache {
    MpConv::Cache conv1;
    nn::Matrix conv1_out;
    nn::Matrix dropout_mask;
    MpConv::Cache conv2;
    nn::MlpCache head;
    nn::Matrix probabilities;
  };

  // Random initialisation when `rng` is given, zeros otherwise.
  DeltaVsgNetwork(const NetworkConfig& config, nn::Rng* rng);

  const NetworkConfig& config() const override { return config_; }
  ForwardPass forward(const EmbeddedGraph& graph, nn::Mode mode, nn::Rng& rng) const override;
  void backward(const ForwardCache& cache, const nn::Matrix& dprobabilities) override;
  void register_parameters(nn::ParamStore& store) override;
  std::unique_ptr<VariabilityNetwork> clone() const override {
    return std::make_unique<DeltaVsgNetwork>(*this);
  }

  MpConv& conv1() { return conv1_; }
  MpConv& conv2() { return conv2_; }
  nn::Mlp& head() { return head_; }

 private:
  NetworkConfig config_;
  MpConv conv1_;
  MpConv conv2_;
  nn::Mlp head_;
};

// Per-node baseline that ignores edges entirely.
class MlpBaselineNetwork final : public VariabilityNetwork {
 public:
  struct Cache : ForwardCache {
    nn::MlpCache trunk;
    nn::Matrix trunk_out;
    nn::Matrix dropout_mask;
    nn::MlpCache head;
    nn::Matrix probabilities;
  };

  MlpBaselineNetwork(const NetworkConfig& config, nn::Rng* rng);

  const NetworkConfig& config() const override { return config_; }
  ForwardPass forward(const EmbeddedGraph& graph, nn::Mode mode, nn::Rng& rng) const override;
  void backward(const ForwardCache& cache, const nn::Matrix& dprobabilities) override;
  void register_parameters(nn::ParamStore& store) override;
  std::unique_ptr<VariabilityNetwork> clone() const override {
    return std::make_unique<MlpBaselineNetwork>(*this);
  }

 private:
  NetworkConfig config_;
  nn::Mlp trunk_;
  nn::Mlp head_;
};

std::unique_ptr<VariabilityNetwork> make_network(const NetworkConfig& config, nn::Rng* rng);

struct VariabilityPrediction {
  std::vector<ObjectId> ids;
  nn::Matrix probabilities;  // N x 3

  double position(std::size_t row) const { return probabilities(static_cast<Eigen::Index>(row), kPosition); }
  double state(std::size_t row) const { return probabilities(static_cast<Eigen::Index>(row), kState); }
  double instance(std::size_t row) const { return probabilities(static_cast<Eigen::Index>(row), kInstance); }
};

// A trained network bundled with everything needed to embed new scenes.
class VsgModel {
 public:
  VsgModel(std::unique_ptr<VariabilityNetwork> network, Taxonomy taxonomy, PcaModel pca,
           EdgeConfig edges);
  VsgModel(const VsgModel& other);
  VsgModel& operator=(const VsgModel& other);
  VsgModel(VsgModel&&) noexcept = default;
  VsgModel& operator=(VsgModel&&) noexcept = default;

  VariabilityNetwork& network() { return *network_; }
  const VariabilityNetwork& network() const { return *network_; }
  const Taxonomy& taxonomy() const { return taxonomy_; }
  const PcaModel& pca() const { return pca_; }
  const EdgeConfig& edges() const { return edges_; }

  // Throws CheckpointError when the scene uses a different taxonomy.
  EmbeddedGraph embed(const SceneGraph& graph) const;
  VariabilityPrediction predict(const SceneGraph& graph) const;
  VariabilityPrediction predict(const EmbeddedGraph& graph) const;

 private:
  std::unique_ptr<VariabilityNetwork> network_;
  Taxonomy taxonomy_;
  PcaModel pca_;
  EdgeConfig edges_;
};

inline constexpr int kCheckpointFormatVersion = 1;

std::string serialize_checkpoint(const VsgModel& model);
VsgModel deserialize_checkpoint(std::string_view text, std::string_view origin = "<memory>");
void save_checkpoint(const VsgModel& model, const std::filesystem::path& path);
VsgModel load_checkpoint(const std::filesystem::path& path);

inline constexpr int kPcaFormatVersion = 1;

// Standalone fitted embedding, as written by the fit-pca command.
std::string serialize_pca_model(const PcaModel& pca);
PcaModel deserialize_pca_model(std::string_view text, std::string_view origin = "<memory>");
void save_pca_model(const PcaModel& pca, const std::filesystem::path& path);
PcaModel load_pca_model(const std::filesystem::path& path);

}  // namespace vsg
