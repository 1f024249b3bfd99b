#include <algorithm>

#include <nlohmann/json.hpp>

#include "vsg/dataset.hpp"
#include "vsg/error.hpp"
#include "vsg/scene_graph_io.hpp"

namespace vsg {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kTaxonomyName = "taxonomy.json";

}  // namespace

Dataset load_dataset(const fs::path& root) {
  const auto manifest_path = root / kManifestName;
  if (!fs::exists(manifest_path)) {
    throw IoError("dataset directory '" + root.string() + "' has no " + kManifestName);
  }
  Json manifest;
  try {
    manifest = Json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  try {
    if (manifest.at("format_version").get<int>() != kManifestFormatVersion) {
      throw ParseError(manifest_path.string() + ": unsupported manifest version");
    }
    const auto taxonomy_file = manifest.value("taxonomy", std::string(kTaxonomyName));
    Dataset dataset{load_taxonomy(root / taxonomy_file), {}};
    for (const auto& je : manifest.at("environments")) {
      Environment env;
      env.id = je.at("id").get<std::string>();
      env.split = split_from_string(je.at("split").get<std::string>());
      for (const auto& scan : je.at("scans")) {
        const auto path = root / env.id / (scan.get<std::string>() + ".json");
        env.scans.push_back(load_scene_graph(path, dataset.taxonomy));
        if (env.scans.back().environment_id() != env.id) {
          throw ParseError(path.string() + ": environment_id does not match its directory");
        }
      }
      dataset.environments.push_back(std::move(env));
    }
    std::sort(dataset.environments.begin(), dataset.environments.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    return dataset;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
}

void save_dataset(const Dataset& dataset, const fs::path& root) {
  fs::create_directories(root);
  save_taxonomy(dataset.taxonomy, root / kTaxonomyName);
  Json environments = Json::array();
  for (const auto& env : dataset.environments) {
    Json scans = Json::array();
    for (const auto& scan : env.scans) {
      save_scene_graph(scan, dataset.taxonomy, root / env.id / (scan.scan_id() + ".json"));
      scans.push_back(scan.scan_id());
    }
    environments.push_back({{"id", env.id}, {"split", to_string(env.split)}, {"scans", scans}});
  }
  Json manifest{{"format_version", kManifestFormatVersion},
                {"taxonomy", kTaxonomyName},
                {"environments", std::move(environments)}};
  write_text_file(root / kManifestName, manifest.dump(2) + "\n");
}

}  // namespace vsg
