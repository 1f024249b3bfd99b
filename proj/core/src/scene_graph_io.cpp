#include "vsg/scene_graph_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vsg/error.hpp"

namespace vsg {
namespace {

using Json = nlohmann::ordered_json;

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

// Field access with a readable path for error messages.
class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  const Json& field(const Json& object, const char* key, const std::string& path) const {
    if (!object.is_object()) fail(path, "expected an object");
    auto it = object.find(key);
    if (it == object.end()) fail(path + "." + key, "missing field");
    return *it;
  }

  std::string string(const Json& value, const std::string& path) const {
    if (!value.is_string()) fail(path, "expected a string");
    return value.get<std::string>();
  }

  double number(const Json& value, const std::string& path) const {
    if (!value.is_number()) fail(path, "expected a number");
    return value.get<double>();
  }

  std::int64_t integer(const Json& value, const std::string& path) const {
    if (!value.is_number_integer()) fail(path, "expected an integer");
    return value.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const Json& value, const std::string& path) const {
    if (!value.is_number_unsigned() &&
        !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
      fail(path, "expected a non-negative integer");
    }
    return value.get<std::uint64_t>();
  }

  const Json& array(const Json& value, const std::string& path) const {
    if (!value.is_array()) fail(path, "expected an array");
    return value;
  }

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError(origin_ + ": field '" + path + "': " + what);
  }

 private:
  std::string origin_;
};

Json node_json(const ObjectNode& n, const Taxonomy& taxonomy) {
  Json attributes = Json::array();
  for (auto a : n.attribute_indices) attributes.push_back(taxonomy.attributes()[a].name);
  return Json{{"id", n.id.value},
              {"class", taxonomy.classes()[n.class_index]},
              {"attributes", std::move(attributes)},
              {"position", {n.position.x(), n.position.y(), n.position.z()}}};
}

Json graph_json(const SceneGraph& g, const Taxonomy& taxonomy,
                const std::vector<NodeAnnotation>* annotations,
                std::string_view annotation_key) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < g.nodes().size(); ++i) {
    Json n = node_json(g.nodes()[i], taxonomy);
    if (annotations != nullptr) {
      Json extra = Json::object();
      for (const auto& [key, value] : (*annotations)[i]) extra[key] = value;
      n[std::string(annotation_key)] = std::move(extra);
    }
    nodes.push_back(std::move(n));
  }
  Json edges = Json::array();
  for (const auto& e : g.semantic_edges()) {
    edges.push_back({{"source", e.source.value},
                     {"target", e.target.value},
                     {"relation", taxonomy.relationships()[e.relation_index]}});
  }
  return Json{{"format_version", kSceneGraphFormatVersion},
              {"environment_id", g.environment_id()},
              {"scan_id", g.scan_id()},
              {"timestamp", g.timestamp()},
              {"taxonomy", g.taxonomy_name()},
              {"nodes", std::move(nodes)},
              {"edges", std::move(edges)}};
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

SceneGraph parse_scene_graph(std::string_view text, const Taxonomy& taxonomy,
                             std::string_view origin) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(origin) + ":" + std::to_string(line_of(text, e.byte)) +
                     ": malformed JSON: " + e.what());
  }
  const Reader r{std::string(origin)};

  const auto version = r.integer(r.field(root, "format_version", ""), "format_version");
  if (version != kSceneGraphFormatVersion) {
    r.fail("format_version", "unsupported version " + std::to_string(version));
  }
  SceneGraph::Header header;
  header.environment_id = r.string(r.field(root, "environment_id", ""), "environment_id");
  header.scan_id = r.string(r.field(root, "scan_id", ""), "scan_id");
  header.timestamp = r.integer(r.field(root, "timestamp", ""), "timestamp");
  header.taxonomy_name = r.string(r.field(root, "taxonomy", ""), "taxonomy");
  if (header.taxonomy_name != taxonomy.name()) {
    throw TaxonomyError(std::string(origin) + ": file uses taxonomy '" +
                        header.taxonomy_name + "', expected '" + taxonomy.name() + "'");
  }

  std::vector<ObjectNode> nodes;
  const auto& node_list = r.array(r.field(root, "nodes", ""), "nodes");
  nodes.reserve(node_list.size());
  for (std::size_t i = 0; i < node_list.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    const auto& jn = node_list[i];
    ObjectNode n;
    n.id.value = r.unsigned_integer(r.field(jn, "id", path), path + ".id");
    n.class_index = taxonomy.class_index(r.string(r.field(jn, "class", path), path + ".class"));
    const auto& attrs = r.array(r.field(jn, "attributes", path), path + ".attributes");
    for (std::size_t k = 0; k < attrs.size(); ++k) {
      n.attribute_indices.push_back(taxonomy.attribute_index(
          r.string(attrs[k], path + ".attributes[" + std::to_string(k) + "]")));
    }
    const auto& pos = r.array(r.field(jn, "position", path), path + ".position");
    if (pos.size() != 3) r.fail(path + ".position", "expected 3 components");
    for (int k = 0; k < 3; ++k) {
      n.position[k] = r.number(pos[static_cast<std::size_t>(k)],
                               path + ".position[" + std::to_string(k) + "]");
    }
    nodes.push_back(std::move(n));
  }

  std::vector<SemanticEdge> edges;
  const auto& edge_list = r.array(r.field(root, "edges", ""), "edges");
  edges.reserve(edge_list.size());
  for (std::size_t i = 0; i < edge_list.size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    const auto& je = edge_list[i];
    SemanticEdge e;
    e.source.value = r.unsigned_integer(r.field(je, "source", path), path + ".source");
    e.target.value = r.unsigned_integer(r.field(je, "target", path), path + ".target");
    e.relation_index = taxonomy.relationship_index(
        r.string(r.field(je, "relation", path), path + ".relation"));
    edges.push_back(e);
  }
  return SceneGraph(std::move(header), std::move(nodes), std::move(edges), taxonomy);
}

SceneGraph load_scene_graph(const std::filesystem::path& path, const Taxonomy& taxonomy) {
  return parse_scene_graph(read_text_file(path), taxonomy, path.string());
}

std::string format_scene_graph(const SceneGraph& graph, const Taxonomy& taxonomy) {
  return graph_json(graph, taxonomy, nullptr, {}).dump(2) + "\n";
}

std::string format_scene_graph(const SceneGraph& graph, const Taxonomy& taxonomy,
                               const std::vector<NodeAnnotation>& annotations,
                               std::string_view annotation_key) {
  if (annotations.size() != graph.num_nodes()) {
    throw DimensionError("annotation count " + std::to_string(annotations.size()) +
                         " does not match node count " +
                         std::to_string(graph.num_nodes()));
  }
  return graph_json(graph, taxonomy, &annotations, annotation_key).dump(2) + "\n";
}

void save_scene_graph(const SceneGraph& graph, const Taxonomy& taxonomy,
                      const std::filesystem::path& path) {
  write_text_file(path, format_scene_graph(graph, taxonomy));
}

}  // namespace vsg
