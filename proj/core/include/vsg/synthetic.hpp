#pragma once

// Procedural generator of changing indoor scenes with known ground truth.
//
// A room is a rectangle with a regular grid of floor slots. Support
// furniture (tables, shelves, ...) additionally offers surface slots.
// Handheld objects sit either on a support surface, linked by the support
// relation, or on the floor away from every support. Between consecutive
// scans each object draws its changes from the propensities of its class
// and every applied change is written to a change log.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vsg/dataset.hpp"
#include "vsg/nn.hpp"
#include "vsg/scene_graph.hpp"
#include "vsg/taxonomy.hpp"

namespace vsg {

enum class ObjectRole {
  kSupport,    // static, offers surface slots
  kFurniture,  // floor object, may move between floor slots
  kHandheld,   // on a support surface or on the floor
  kClutter,    // spawned fresh for every scan
};
std::string to_string(ObjectRole role);
ObjectRole object_role_from_string(const std::string& text);

struct ClassPropensity {
  std::string class_name;
  ObjectRole role = ObjectRole::kFurniture;
  std::size_t min_count = 0;
  std::size_t max_count = 0;
  double height = 0.5;  // z of floor placements

  // Handheld and clutter: probability of being placed on a support surface.
  double support_fraction = 0.0;
  // Furniture, and handheld objects on a support.
  double move_probability = 0.0;
  // Handheld objects on the floor.
  double unsupported_move_probability = 0.0;

  // Mutually exclusive state attributes; the object holds exactly one.
  std::vector<std::string> states;
  double toggle_probability = 0.0;

  double remove_probability = 0.0;
  // Attributes every instance carries (static or affordance).
  std::vector<std::string> attributes;
};

struct GeneratorSpec {
  explicit GeneratorSpec(Taxonomy t) : taxonomy(std::move(t)) {}

  Taxonomy taxonomy;
  std::vector<ClassPropensity> classes;
  double room_width = 10.0;
  double room_depth = 8.0;
  double floor_spacing = 1.0;
  double surface_height = 0.8;
  // Surface slots form a grid of surface_grid_x by surface_grid_y cells,
  // spaced 2 * surface_offset and centred on the support.
  double surface_offset = 0.3;
  std::size_t surface_grid_x = 2;
  std::size_t surface_grid_y = 2;
  double support_clearance = 1.5;
  double min_move_distance = 0.5;
  double position_jitter = 0.01;  // per axis, uniform in [-j, j], around the slot
  std::string support_relation = "standing on";
  std::size_t num_scans = 3;
  std::size_t num_environments = 100;
  SplitFractions split_fractions;
};

// Reads the JSON generator spec. The taxonomy is embedded under "taxonomy".
GeneratorSpec load_generator_spec(const std::filesystem::path& path);
GeneratorSpec parse_generator_spec(std::string_view text, std::string_view origin = "<memory>");
std::string format_generator_spec(const GeneratorSpec& spec);

struct ObjectSnapshot {
  ObjectId id;
  Vec3 position = Vec3::Zero();
  std::vector<std::size_t> state_attributes;  // sorted

  friend bool operator==(const ObjectSnapshot& a, const ObjectSnapshot& b) {
    return a.id == b.id && a.position == b.position && a.state_attributes == b.state_attributes;
  }
};

struct ChangeEvent {
  enum class Type { kMoved, kStateChanged, kRemoved, kAdded };

  Type type = Type::kMoved;
  ObjectId id;
  Vec3 from = Vec3::Zero();  // kMoved
  Vec3 to = Vec3::Zero();    // kMoved, kAdded
  std::vector<std::size_t> state_from;  // kStateChanged
  std::vector<std::size_t> state_to;    // kStateChanged, kAdded
};
std::string to_string(ChangeEvent::Type type);

struct Transition {
  std::size_t from_scan = 0;
  std::size_t to_scan = 0;
  std::vector<ChangeEvent> events;
};

struct ChangeLog {
  std::vector<ObjectSnapshot> initial;  // inventory of scan 0
  std::vector<Transition> transitions;  // scan k -> k + 1
};

struct SyntheticSequence {
  std::vector<SceneGraph> scans;
  ChangeLog log;
};

// Throws GeneratorError when the room cannot hold the sampled objects.
SyntheticSequence generate_synthetic_scene_sequence(const GeneratorSpec& spec,
                                                    const std::string& environment_id,
                                                    nn::Rng& rng);

// Object inventory of every scan, reconstructed from the log alone.
std::vector<std::vector<ObjectSnapshot>> replay_change_log(const ChangeLog& log);

// Labels for the pair (current, future) derived only from the change log;
// any ordered pair of scans is supported.
LabelMap labels_from_change_log(const ChangeLog& log, std::size_t current, std::size_t future,
                                const LabelConfig& config);

struct SyntheticDataset {
  Dataset dataset;
  std::vector<ChangeLog> logs;  // aligned with dataset.environments
};

SyntheticDataset generate_synthetic_dataset(const GeneratorSpec& spec, std::uint64_t seed);

// Writes the dataset layout plus <root>/<environment>/changes.json.
void save_synthetic_dataset(const SyntheticDataset& data, const std::filesystem::path& root);

std::string format_change_log(const ChangeLog& log, const Taxonomy& taxonomy);

}  // namespace vsg
