#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "vsg/taxonomy.hpp"

namespace vsg {

using Vec3 = Eigen::Vector3d;

// Persistent object instance identifier, stable across the scans of one
// environment.
struct ObjectId {
  std::uint64_t value = 0;

  friend auto operator<=>(const ObjectId&, const ObjectId&) = default;
};

struct ObjectNode {
  ObjectId id;
  std::size_t class_index = 0;
  // Sorted ascending, no duplicates.
  std::vector<std::size_t> attribute_indices;
  Vec3 position = Vec3::Zero();

  bool has_attribute(std::size_t index) const;

  friend bool operator==(const ObjectNode& a, const ObjectNode& b) {
    return a.id == b.id && a.class_index == b.class_index &&
           a.attribute_indices == b.attribute_indices && a.position == b.position;
  }
};

struct SemanticEdge {
  ObjectId source;
  ObjectId target;
  std::size_t relation_index = 0;

  friend bool operator==(const SemanticEdge&, const SemanticEdge&) = default;
};

// One scan of one environment. Validated on construction and immutable
// afterwards.
class SceneGraph {
 public:
  struct Header {
    std::string environment_id;
    std::string scan_id;
    std::int64_t timestamp = 0;
    std::string taxonomy_name;

    friend bool operator==(const Header&, const Header&) = default;
  };

  SceneGraph() = default;

  // Validates every invariant against `taxonomy`; throws GraphError or
  // TaxonomyError on violation.
  SceneGraph(Header header, std::vector<ObjectNode> nodes,
             std::vector<SemanticEdge> edges, const Taxonomy& taxonomy);

  const Header& header() const { return header_; }
  const std::string& environment_id() const { return header_.environment_id; }
  const std::string& scan_id() const { return header_.scan_id; }
  std::int64_t timestamp() const { return header_.timestamp; }
  const std::string& taxonomy_name() const { return header_.taxonomy_name; }

  const std::vector<ObjectNode>& nodes() const { return nodes_; }
  const std::vector<SemanticEdge>& semantic_edges() const { return edges_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  // Row index of a node; nullopt when absent.
  std::optional<std::size_t> find(ObjectId id) const;
  bool contains(ObjectId id) const { return find(id).has_value(); }
  // Throws LookupError when absent.
  const ObjectNode& node(ObjectId id) const;

  friend bool operator==(const SceneGraph& a, const SceneGraph& b) {
    return a.header_ == b.header_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  Header header_;
  std::vector<ObjectNode> nodes_;
  std::vector<SemanticEdge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

// Position of j relative to i in the common world frame: r_j - r_i.
Vec3 relative_position(const SceneGraph& graph, ObjectId i, ObjectId j);

// Source class index -> target class index.
using ClassMapping = std::map<std::size_t, std::size_t>;

// Remap node classes into `target`. Attributes, positions and edges are kept
// untouched; the attribute and relationship vocabularies of `target` must
// therefore index-match the source taxonomy.
SceneGraph map_taxonomy(const SceneGraph& graph, const ClassMapping& mapping,
                        const Taxonomy& target);

}  // namespace vsg

template <>
struct std::hash<vsg::ObjectId> {
  std::size_t operator()(const vsg::ObjectId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
