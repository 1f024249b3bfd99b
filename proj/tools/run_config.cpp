#include "run_config.hpp"

#include <set>

#include "vsg/error.hpp"
#include "vsg/scene_graph_io.hpp"

namespace vsg::cli {
namespace {

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in '" + where + "'");
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("'" + where + "." + key + "' has the wrong type");
  }
}

}  // namespace

void apply_json(RunConfig& c, const Json& j) {
  reject_unknown(j, {"model", "train", "loss", "labels"}, "config");
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m, {"architecture", "hidden_dim", "pca_dim", "tau", "include_semantic_edges", "gate"},
                   "model");
    read(m, "architecture", c.model.architecture, "model");
    read(m, "hidden_dim", c.model.hidden_dim, "model");
    read(m, "pca_dim", c.model.pca_dim, "model");
    if (m.contains("tau") && m.at("tau").is_number()) {
      c.model.tau = m.at("tau").dump();
    } else {
      read(m, "tau", c.model.tau, "model");
    }
    read(m, "include_semantic_edges", c.model.include_semantic_edges, "model");
    if (m.contains("gate")) {
      std::string gate;
      read(m, "gate", gate, "model");
      c.model.gate = gate_mode_from_string(gate);
    }
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    reject_unknown(t,
                   {"epochs", "batch_size", "learning_rate", "dropout_rate", "seed", "patience",
                    "samples_per_epoch", "importance_sampling"},
                   "train");
    read(t, "epochs", c.train.epochs, "train");
    read(t, "batch_size", c.train.batch_size, "train");
    read(t, "learning_rate", c.train.learning_rate, "train");
    read(t, "dropout_rate", c.train.dropout_rate, "train");
    read(t, "seed", c.train.seed, "train");
    read(t, "patience", c.train.patience, "train");
    read(t, "samples_per_epoch", c.train.samples_per_epoch, "train");
    read(t, "importance_sampling", c.train.importance_sampling, "train");
  }
  if (j.contains("loss")) {
    const auto& l = j.at("loss");
    reject_unknown(l, {"gamma", "class_weights", "auto_class_weights", "max_class_weight"}, "loss");
    read(l, "gamma", c.loss.gamma, "loss");
    read(l, "class_weights", c.loss.class_weights, "loss");
    read(l, "auto_class_weights", c.loss.auto_class_weights, "loss");
    read(l, "max_class_weight", c.loss.max_class_weight, "loss");
  }
  if (j.contains("labels")) {
    const auto& l = j.at("labels");
    reject_unknown(l, {"epsilon", "require_state_attributes"}, "labels");
    read(l, "epsilon", c.labels.epsilon, "labels");
    read(l, "require_state_attributes", c.labels.require_state_attributes, "labels");
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw IoError("config file '" + path.string() + "' does not exist");
  }
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  RunConfig config;
  apply_json(config, j);
  return config;
}

Json to_json(const LabelConfig& labels) {
  return Json{{"epsilon", labels.epsilon},
              {"require_state_attributes", labels.require_state_attributes}};
}

Json to_json(const RunConfig& c) {
  return Json{
      {"model",
       {{"architecture", c.model.architecture},
        {"hidden_dim", c.model.hidden_dim},
        {"pca_dim", c.model.pca_dim},
        {"tau", c.model.tau},
        {"include_semantic_edges", c.model.include_semantic_edges},
        {"gate", to_string(c.model.gate)}}},
      {"train",
       {{"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"learning_rate", c.train.learning_rate},
        {"dropout_rate", c.train.dropout_rate},
        {"seed", c.train.seed},
        {"patience", c.train.patience},
        {"samples_per_epoch", c.train.samples_per_epoch},
        {"importance_sampling", c.train.importance_sampling}}},
      {"loss",
       {{"gamma", c.loss.gamma},
        {"class_weights", c.loss.class_weights},
        {"auto_class_weights", c.loss.auto_class_weights},
        {"max_class_weight", c.loss.max_class_weight}}},
      {"labels", to_json(c.labels)}};
}

void validate(const RunConfig& c) {
  c.train.validate();
  c.loss.validate();
  TauSetting::parse(c.model.tau);
  if (c.model.hidden_dim == 0) throw ConfigError("model.hidden_dim must be positive");
  if (c.model.pca_dim == 0) throw ConfigError("model.pca_dim must be positive");
  if (c.model.architecture != "delta_vsg" && c.model.architecture != "mlp") {
    throw ConfigError("unknown architecture '" + c.model.architecture + "'");
  }
  if (!(c.labels.epsilon > 0.0)) throw ConfigError("labels.epsilon must be positive");
}

}  // namespace vsg::cli
