#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vsg/nn.hpp"
#include "vsg/scene_graph.hpp"
#include "vsg/taxonomy.hpp"

namespace vsg {

struct LabelConfig {
  double epsilon = 0.1;  // metres; y_P = |displacement| >= epsilon
  // When set, nodes without any state-kind attribute carry no state label.
  bool require_state_attributes = true;
};

struct VariabilityLabel {
  bool position = false;
  bool state = false;
  bool instance = false;
  bool position_valid = true;
  bool state_valid = true;

  friend bool operator==(const VariabilityLabel&, const VariabilityLabel&) = default;
};

using LabelMap = std::map<ObjectId, VariabilityLabel>;

// Labels for every node of `current`, matched to `future` by object id.
// Throws PairingError when the graphs belong to different environments or
// taxonomies.
LabelMap compute_labels(const SceneGraph& current, const SceneGraph& future,
                        const Taxonomy& taxonomy, const LabelConfig& config);

struct ScanPair {
  std::size_t current = 0;
  std::size_t future = 0;

  friend bool operator==(const ScanPair&, const ScanPair&) = default;
};

// All ordered pairs (i, j), i != j, in lexicographic order: n(n-1) pairs.
// Fewer than two scans yields no pairs and a warning.
std::vector<ScanPair> augment_pairs(std::size_t num_scans);
std::vector<ScanPair> augment_pairs(std::span<const SceneGraph> scans);

struct Sample {
  SceneGraph input;
  std::vector<VariabilityLabel> labels;  // aligned with input.nodes()
  std::pair<std::string, std::string> pair_id;
};

std::vector<Sample> build_samples(std::span<const SceneGraph> scans, const Taxonomy& taxonomy,
                                  const LabelConfig& config);

enum class Split { kTrain, kVal, kTest };
std::string to_string(Split split);
Split split_from_string(const std::string& text);

struct SplitFractions {
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
};

// Deterministic environment-level assignment (no environment spans splits).
std::vector<Split> assign_splits(std::size_t num_environments, const SplitFractions& fractions,
                                 std::uint64_t seed);

struct Environment {
  std::string id;
  Split split = Split::kTrain;
  std::vector<SceneGraph> scans;  // scan order
};

struct Dataset {
  Taxonomy taxonomy;
  std::vector<Environment> environments;  // sorted by id
};

inline constexpr int kManifestFormatVersion = 1;

// Directory layout: <root>/manifest.json, <root>/taxonomy.json and
// <root>/<environment_id>/<scan_id>.json.
Dataset load_dataset(const std::filesystem::path& root);
void save_dataset(const Dataset& dataset, const std::filesystem::path& root);

std::vector<Sample> samples_for(const Dataset& dataset, Split split, const LabelConfig& config);
std::vector<SceneGraph> scans_for(const Dataset& dataset, Split split);

struct LabelStats {
  std::array<std::size_t, 3> positives{};
  std::array<std::size_t, 3> support{};  // unmasked elements

  double positive_rate(std::size_t variability) const {
    return support[variability] == 0
               ? 0.0
               : static_cast<double>(positives[variability]) /
                     static_cast<double>(support[variability]);
  }
  std::size_t total_positives() const { return positives[0] + positives[1] + positives[2]; }
};

LabelStats label_statistics(std::span<const Sample> samples);

// Per-sample weight proportional to the inverse positive rate of the rarest
// variability type the sample contains (1 for samples without positives),
// normalised to sum to one. An all-negative dataset yields uniform weights
// and a warning.
std::vector<double> importance_sample(std::span<const Sample> samples, const LabelStats& stats);

// Draw `count` sample indices with replacement according to `weights`.
std::vector<std::size_t> draw_epoch(std::span<const double> weights, std::size_t count,
                                    nn::Rng& rng);

}  // namespace vsg
