// Checkpoint container: a single JSON document. Doubles are written in
// shortest round-trip form, so save -> load reproduces every parameter
// bit-exactly. Layout is documented in docs/formats.md.

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "vsg/error.hpp"
#include "vsg/model.hpp"
#include "vsg/scene_graph_io.hpp"

namespace vsg {
namespace {

using Json = nlohmann::ordered_json;

Json matrix_json(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw CheckpointError("matrix payload size does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  }
  return m;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Json tau_json(double tau) {
  if (std::isinf(tau)) return "inf";
  return tau;
}

double tau_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  return j.get<double>();
}

Json pca_json(const PcaModel& pca) {
  return Json{{"input_dim", pca.input_dim()},
              {"output_dim", pca.output_dim()},
              {"rank", pca.rank},
              {"rank_deficient", pca.rank_deficient},
              {"mean", vector_json(pca.mean)},
              {"components", matrix_json(pca.components)},
              {"explained_variance_ratio", vector_json(pca.explained_variance_ratio)}};
}

PcaModel pca_from_json(const Json& j) {
  PcaModel pca;
  pca.mean = vector_from_json(j.at("mean"));
  pca.components = matrix_from_json(j.at("components"));
  pca.explained_variance_ratio = vector_from_json(j.at("explained_variance_ratio"));
  pca.rank = j.at("rank").get<std::size_t>();
  pca.rank_deficient = j.at("rank_deficient").get<bool>();
  if (pca.components.cols() != pca.mean.size() ||
      pca.explained_variance_ratio.size() != pca.components.rows()) {
    throw CheckpointError("PCA model shapes are inconsistent");
  }
  return pca;
}

}  // namespace

std::string serialize_checkpoint(const VsgModel& model) {
  const auto& cfg = model.network().config();
  Json hyper{{"architecture", cfg.architecture},
             {"input_dim", cfg.input_dim},
             {"hidden_dim", cfg.hidden_dim},
             {"num_relations", cfg.num_relations},
             {"dropout_rate", cfg.dropout_rate},
             {"gate", to_string(cfg.gate)}};
  Json params = Json::array();
  auto& network = const_cast<VariabilityNetwork&>(model.network());
  const auto store = network.parameters();
  for (const auto* p : store.entries()) {
    Json entry = matrix_json(p->value);
    entry["name"] = p->name;
    params.push_back(std::move(entry));
  }
  Json root{{"format_version", kCheckpointFormatVersion},
            {"taxonomy_name", model.taxonomy().name()},
            {"taxonomy", Json::parse(taxonomy_to_json_string(model.taxonomy()))},
            {"hyperparameters", std::move(hyper)},
            {"edge_config",
             {{"tau", tau_json(model.edges().tau)},
              {"include_semantic_edges", model.edges().include_semantic_edges}}},
            {"pca_model", pca_json(model.pca())},
            {"parameters", std::move(params)}};
  return root.dump() + "\n";
}

VsgModel deserialize_checkpoint(std::string_view text, std::string_view origin) {
  const std::string where(origin);
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CheckpointError(where + ": unreadable checkpoint (" + e.what() + ")");
  }
  try {
    const int version = root.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw CheckpointError(where + ": checkpoint format version " + std::to_string(version) +
                            " is not supported (expected " +
                            std::to_string(kCheckpointFormatVersion) + ")");
    }
    Taxonomy taxonomy = taxonomy_from_json_string(root.at("taxonomy").dump());
    if (taxonomy.name() != root.at("taxonomy_name").get<std::string>()) {
      throw CheckpointError(where + ": embedded taxonomy name does not match taxonomy_name");
    }

    const auto& h = root.at("hyperparameters");
    NetworkConfig cfg;
    cfg.architecture = h.at("architecture").get<std::string>();
    cfg.input_dim = h.at("input_dim").get<std::size_t>();
    cfg.hidden_dim = h.at("hidden_dim").get<std::size_t>();
    cfg.num_relations = h.at("num_relations").get<std::size_t>();
    cfg.dropout_rate = h.at("dropout_rate").get<double>();
    cfg.gate = gate_mode_from_string(h.at("gate").get<std::string>());
    auto network = make_network(cfg, nullptr);

    auto store = network->parameters();
    const auto& params = root.at("parameters");
    if (params.size() != store.size()) {
      throw CheckpointError(where + ": expected " + std::to_string(store.size()) +
                            " parameter tensors, found " + std::to_string(params.size()));
    }
    for (const auto& entry : params) {
      const auto name = entry.at("name").get<std::string>();
      auto* p = store.find(name);
      if (p == nullptr) throw CheckpointError(where + ": unexpected parameter '" + name + "'");
      Eigen::MatrixXd value = matrix_from_json(entry);
      if (value.rows() != p->value.rows() || value.cols() != p->value.cols()) {
        throw CheckpointError(where + ": parameter '" + name + "' has the wrong shape");
      }
      p->value = std::move(value);
    }

    PcaModel pca = pca_from_json(root.at("pca_model"));

    EdgeConfig edges;
    edges.tau = tau_from_json(root.at("edge_config").at("tau"));
    edges.include_semantic_edges = root.at("edge_config").at("include_semantic_edges").get<bool>();

    return VsgModel(std::move(network), std::move(taxonomy), std::move(pca), edges);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(where + ": malformed checkpoint (" + e.what() + ")");
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(where + ": " + e.what());
  }
}

void save_checkpoint(const VsgModel& model, const std::filesystem::path& path) {
  write_text_file(path, serialize_checkpoint(model));
}

VsgModel load_checkpoint(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw CheckpointError(e.what());
  }
  return deserialize_checkpoint(text, path.string());
}


std::string serialize_pca_model(const PcaModel& pca) {
  Json root{{"format_version", kPcaFormatVersion}, {"pca_model", pca_json(pca)}};
  return root.dump() + "\n";
}

PcaModel deserialize_pca_model(std::string_view text, std::string_view origin) {
  const std::string where(origin);
  try {
    const Json root = Json::parse(text);
    const int version = root.at("format_version").get<int>();
    if (version != kPcaFormatVersion) {
      throw CheckpointError(where + ": PCA format version " + std::to_string(version) +
                            " is not supported");
    }
    return pca_from_json(root.at("pca_model"));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(where + ": malformed PCA model (" + e.what() + ")");
  } catch (const CheckpointError& e) {
    if (std::string_view(e.what()).starts_with(where)) throw;
    throw CheckpointError(where + ": " + e.what());
  }
}

void save_pca_model(const PcaModel& pca, const std::filesystem::path& path) {
  write_text_file(path, serialize_pca_model(pca));
}

PcaModel load_pca_model(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw CheckpointError(e.what());
  }
  return deserialize_pca_model(text, path.string());
}

}  // namespace vsg
