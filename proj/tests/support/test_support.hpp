#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vsg/embedding.hpp"
#include "vsg/nn.hpp"
#include "vsg/scene_graph.hpp"
#include "vsg/taxonomy.hpp"

namespace vsg::testing {

// table, chair, cup, lamp / wooden(static) on(state) off(state) sitting(affordance)
inline Taxonomy small_taxonomy() {
  return Taxonomy("test-home", {"table", "chair", "cup", "lamp"},
                  {{"wooden", AttributeKind::kStatic},
                   {"on", AttributeKind::kState},
                   {"off", AttributeKind::kState},
                   {"sitting", AttributeKind::kAffordance}},
                  {"standing on", "close by"});
}

inline ObjectNode make_node(std::uint64_t id, std::size_t cls, std::vector<std::size_t> attrs,
                            Vec3 pos) {
  ObjectNode n;
  n.id = ObjectId{id};
  n.class_index = cls;
  n.attribute_indices = std::move(attrs);
  n.position = pos;
  return n;
}

inline SceneGraph make_graph(const Taxonomy& taxonomy, std::vector<ObjectNode> nodes,
                             std::vector<SemanticEdge> edges = {},
                             const std::string& scan = "s0", const std::string& env = "env") {
  return SceneGraph({env, scan, 0, taxonomy.name()}, std::move(nodes), std::move(edges),
                    taxonomy);
}

// Random valid graph with 1..max_nodes nodes in a 5 m cube.
inline SceneGraph random_graph(const Taxonomy& taxonomy, nn::Rng& rng, std::size_t max_nodes,
                               const std::string& scan = "s0") {
  std::uniform_int_distribution<std::size_t> count(1, max_nodes);
  std::uniform_int_distribution<std::size_t> cls(0, taxonomy.num_classes() - 1);
  std::uniform_real_distribution<double> coord(0.0, 5.0);
  std::bernoulli_distribution coin(0.4);
  const std::size_t n = count(rng);
  std::vector<ObjectNode> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> attrs;
    for (std::size_t a = 0; a < taxonomy.num_attributes(); ++a) {
      if (coin(rng)) attrs.push_back(a);
    }
    nodes.push_back(make_node(10 + i, cls(rng), attrs, {coord(rng), coord(rng), coord(rng)}));
  }
  std::vector<SemanticEdge> edges;
  std::uniform_int_distribution<std::size_t> rel(0, taxonomy.num_relationships() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && coin(rng) && coin(rng)) {
        edges.push_back({nodes[i].id, nodes[j].id, rel(rng)});
      }
    }
  }
  return make_graph(taxonomy, std::move(nodes), std::move(edges), scan);
}

inline nn::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, nn::Rng& rng,
                                double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  nn::Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

// Kinks are easier to avoid with nonzero biases.
inline void randomize_biases(const nn::ParamStore& store, nn::Rng& rng, double scale = 0.5) {
  for (auto* p : store.entries()) {
    if (p->name.ends_with(".bias")) p->value = random_matrix(p->value.rows(), p->value.cols(), rng, scale);
  }
}

// Embedded graph with random features and a random directed edge set.
inline EmbeddedGraph random_embedded(nn::Rng& rng, std::size_t nodes, std::size_t feature_dim,
                                     std::size_t relations) {
  EmbeddedGraph g;
  const auto n = static_cast<Eigen::Index>(nodes);
  g.node_features = random_matrix(n, static_cast<Eigen::Index>(feature_dim), rng);
  for (std::size_t i = 0; i < nodes; ++i) g.node_ids.push_back(ObjectId{i + 1});
  std::bernoulli_distribution coin(0.35);
  for (std::size_t s = 0; s < nodes; ++s) {
    for (std::size_t t = 0; t < nodes; ++t) {
      if (s != t && coin(rng)) g.edge_index.push_back({s, t});
    }
  }
  g.edge_features = random_matrix(static_cast<Eigen::Index>(g.edge_index.size()),
                                  static_cast<Eigen::Index>(relations + 3), rng);
  return g;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("vsg_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace vsg::testing
