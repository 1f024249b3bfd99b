#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vsg/scene_graph.hpp"
#include "vsg/taxonomy.hpp"

namespace vsg {

// Mean-centred principal component projection of the binary semantic
// encoding. Rows of `components` are orthonormal for the first `rank`
// components; components beyond the data rank are zero rows.
struct PcaModel {
  Eigen::VectorXd mean;                      // D
  Eigen::MatrixXd components;                // d_v x D
  Eigen::VectorXd explained_variance_ratio;  // d_v, non-increasing
  std::size_t rank = 0;
  bool rank_deficient = false;

  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(components.rows()); }
  double retained_variance() const { return explained_variance_ratio.sum(); }

  friend bool operator==(const PcaModel& a, const PcaModel& b) {
    return a.mean == b.mean && a.components == b.components &&
           a.explained_variance_ratio == b.explained_variance_ratio &&
           a.rank == b.rank && a.rank_deficient == b.rank_deficient;
  }
};

// Class one-hot followed by attribute multi-hot, length |O| + |A|.
Eigen::VectorXd encode_binary(const ObjectNode& node, const Taxonomy& taxonomy);

// Rows of `vectors` are samples. Throws DimensionError when there are fewer
// samples than `dim` or `dim` exceeds the input width.
PcaModel fit_pca(const Eigen::MatrixXd& vectors, std::size_t dim);
Eigen::VectorXd transform_pca(const PcaModel& model, const Eigen::VectorXd& v);
Eigen::VectorXd inverse_transform_pca(const PcaModel& model, const Eigen::VectorXd& z);

// Stack encode_binary over every node of every graph.
Eigen::MatrixXd encode_nodes(std::span<const SceneGraph> graphs, const Taxonomy& taxonomy);

struct EdgeConfig {
  double tau = 0.0;  // metres, geometric edge iff distance < tau
  bool include_semantic_edges = true;

  friend bool operator==(const EdgeConfig&, const EdgeConfig&) = default;
};

// Geometric threshold given either in metres or as a percentile (p0..p100)
// of all pairwise intra-scene object distances of a reference set.
struct TauSetting {
  std::optional<double> metres;
  std::optional<double> percentile;

  // Accepts "p25", "p75", "1.5", "inf".
  static TauSetting parse(const std::string& text);
  std::string to_string() const;
};

double pairwise_distance_percentile(std::span<const SceneGraph> graphs, double percentile);
double resolve_tau(const TauSetting& setting, std::span<const SceneGraph> reference);

struct Edge {
  std::size_t source = 0;
  std::size_t target = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct EdgeSet {
  std::vector<Edge> index;   // M_E, sorted by (source, target)
  Eigen::MatrixXd features;  // M_R, rows = [relation bits | r_target - r_source]
};

EdgeSet build_edges(const SceneGraph& graph, const Taxonomy& taxonomy,
                    const EdgeConfig& config);

struct EmbeddedGraph {
  Eigen::MatrixXd node_features;  // M_v, N_v x d_v
  std::vector<Edge> edge_index;   // M_E
  Eigen::MatrixXd edge_features;  // M_R, N_e x (|R| + 3)
  std::vector<ObjectId> node_ids;

  std::size_t num_nodes() const { return node_ids.size(); }
  std::size_t num_edges() const { return edge_index.size(); }
};

EmbeddedGraph embed(const SceneGraph& graph, const Taxonomy& taxonomy,
                    const PcaModel& pca, const EdgeConfig& config);

}  // namespace vsg
