#pragma once

// Merged configuration of a training run, read from a JSON file and
// overridden by command line flags.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "vsg/dataset.hpp"
#include "vsg/training.hpp"

namespace vsg::cli {

using Json = nlohmann::ordered_json;

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  LossConfig loss;
  LabelConfig labels;
};

// Unknown sections or keys raise ConfigError so that typos never pass
// silently. Missing keys keep their current value.
void apply_json(RunConfig& config, const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);

Json to_json(const RunConfig& config);
Json to_json(const LabelConfig& labels);

void validate(const RunConfig& config);

}  // namespace vsg::cli
