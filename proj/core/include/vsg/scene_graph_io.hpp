#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vsg/scene_graph.hpp"
#include "vsg/taxonomy.hpp"

namespace vsg {

inline constexpr int kSceneGraphFormatVersion = 1;

// Extra numeric fields attached to a node in the written file, in order.
// Used to emit variable scene graphs (scene graph + variability).
using NodeAnnotation = std::vector<std::pair<std::string, double>>;

// Parse a scene graph file. Names are resolved against `taxonomy`; unknown
// symbols raise TaxonomyError, malformed content raises ParseError with the
// offending field.
SceneGraph load_scene_graph(const std::filesystem::path& path,
                            const Taxonomy& taxonomy);
SceneGraph parse_scene_graph(std::string_view text, const Taxonomy& taxonomy,
                             std::string_view origin = "<memory>");

// Canonical writer. Output is deterministic, so writing a graph that was
// read from a canonical file reproduces its bytes.
std::string format_scene_graph(const SceneGraph& graph, const Taxonomy& taxonomy);
std::string format_scene_graph(const SceneGraph& graph, const Taxonomy& taxonomy,
                               const std::vector<NodeAnnotation>& annotations,
                               std::string_view annotation_key);
void save_scene_graph(const SceneGraph& graph, const Taxonomy& taxonomy,
                      const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace vsg
