#include "vsg/scene_graph.hpp"

#include <algorithm>
#include <string>

#include "vsg/error.hpp"

namespace vsg {

bool ObjectNode::has_attribute(std::size_t index) const {
  return std::binary_search(attribute_indices.begin(), attribute_indices.end(), index);
}

SceneGraph::SceneGraph(Header header, std::vector<ObjectNode> nodes,
                       std::vector<SemanticEdge> edges, const Taxonomy& taxonomy)
    : header_(std::move(header)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  if (header_.taxonomy_name != taxonomy.name()) {
    throw TaxonomyError("scene '" + header_.scan_id + "' uses taxonomy '" +
                        header_.taxonomy_name + "' but '" + taxonomy.name() +
                        "' was supplied");
  }
  index_.reserve(nodes_.size());
  for (std::size_t row = 0; row < nodes_.size(); ++row) {
    auto& n = nodes_[row];
    const std::string where = "node " + std::to_string(n.id.value);
    if (n.class_index >= taxonomy.num_classes()) {
      throw TaxonomyError(where + ": class index " + std::to_string(n.class_index) +
                          " out of range");
    }
    std::sort(n.attribute_indices.begin(), n.attribute_indices.end());
    if (std::adjacent_find(n.attribute_indices.begin(), n.attribute_indices.end()) !=
        n.attribute_indices.end()) {
      throw GraphError(where + ": duplicate attribute");
    }
    if (!n.attribute_indices.empty() &&
        n.attribute_indices.back() >= taxonomy.num_attributes()) {
      throw TaxonomyError(where + ": attribute index out of range");
    }
    if (!n.position.allFinite()) {
      throw GraphError(where + ": non-finite position");
    }
    if (!index_.emplace(n.id.value, row).second) {
      throw GraphError("duplicate node id " + std::to_string(n.id.value));
    }
  }
  for (const auto& e : edges_) {
    const std::string where = "edge " + std::to_string(e.source.value) + "->" +
                              std::to_string(e.target.value);
    if (e.source == e.target) throw GraphError(where + ": self edge");
    if (!index_.contains(e.source.value) || !index_.contains(e.target.value)) {
      throw GraphError(where + ": endpoint does not resolve to a node");
    }
    if (e.relation_index >= taxonomy.num_relationships()) {
      throw TaxonomyError(where + ": relation index out of range");
    }
  }
}

std::optional<std::size_t> SceneGraph::find(ObjectId id) const {
  auto it = index_.find(id.value);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const ObjectNode& SceneGraph::node(ObjectId id) const {
  auto row = find(id);
  if (!row) {
    throw LookupError("object " + std::to_string(id.value) + " not in scene '" +
                      header_.scan_id + "'");
  }
  return nodes_[*row];
}

Vec3 relative_position(const SceneGraph& graph, ObjectId i, ObjectId j) {
  return graph.node(j).position - graph.node(i).position;
}

SceneGraph map_taxonomy(const SceneGraph& graph, const ClassMapping& mapping,
                        const Taxonomy& target) {
  std::vector<ObjectNode> nodes = graph.nodes();
  for (auto& n : nodes) {
    auto it = mapping.find(n.class_index);
    if (it == mapping.end()) {
      throw MappingError("no mapping entry for class index " +
                         std::to_string(n.class_index) + " (object " +
                         std::to_string(n.id.value) + ")");
    }
    n.class_index = it->second;
  }
  auto header = graph.header();
  header.taxonomy_name = target.name();
  return SceneGraph(std::move(header), std::move(nodes), graph.semantic_edges(), target);
}

}  // namespace vsg
