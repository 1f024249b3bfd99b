#include <algorithm>
#include <map>
#include <iterator>
#include <set>
#include <tuple>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "vsg/error.hpp"
#include "vsg/log.hpp"
#include "vsg/rscan.hpp"
#include "vsg/scene_graph_io.hpp"

namespace vsg {
namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

struct RawObject {
  std::uint64_t id = 0;
  std::string label;
  std::vector<std::pair<std::string, std::string>> attributes;  // (category, value)
  std::vector<std::string> affordances;
};

struct RawRelationship {
  std::uint64_t source = 0;
  std::uint64_t target = 0;
  std::string name;
};

std::optional<Json> read_json(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::uint64_t id_value(const Json& j) {
  if (j.is_string()) return std::stoull(j.get<std::string>());
  return j.get<std::uint64_t>();
}

std::map<std::string, std::vector<RawObject>> parse_objects(const Json& root) {
  std::map<std::string, std::vector<RawObject>> out;
  for (const auto& scan : root.at("scans")) {
    auto& objects = out[scan.at("scan").get<std::string>()];
    for (const auto& jo : scan.at("objects")) {
      RawObject o;
      o.id = id_value(jo.at("id"));
      o.label = jo.at("label").get<std::string>();
      if (auto it = jo.find("attributes"); it != jo.end() && it->is_object()) {
        for (const auto& [category, values] : it->items()) {
          for (const auto& v : values) o.attributes.emplace_back(category, v.get<std::string>());
        }
      }
      if (auto it = jo.find("affordances"); it != jo.end() && it->is_array()) {
        for (const auto& v : *it) o.affordances.push_back(v.get<std::string>());
      }
      objects.push_back(std::move(o));
    }
  }
  return out;
}

std::map<std::string, std::vector<RawRelationship>> parse_relationships(const Json& root) {
  std::map<std::string, std::vector<RawRelationship>> out;
  for (const auto& scan : root.at("scans")) {
    auto& rels = out[scan.at("scan").get<std::string>()];
    for (const auto& jr : scan.at("relationships")) {
      rels.push_back({id_value(jr.at(0)), id_value(jr.at(1)), jr.at(3).get<std::string>()});
    }
  }
  return out;
}

Taxonomy derive_taxonomy(const std::map<std::string, std::vector<RawObject>>& objects,
                         const std::map<std::string, std::vector<RawRelationship>>& relationships) {
  std::set<std::string> classes;
  std::map<std::string, AttributeKind> attributes;
  std::set<std::string> relation_names;
  for (const auto& [scan, list] : objects) {
    for (const auto& o : list) {
      classes.insert(o.label);
      for (const auto& [category, value] : o.attributes) {
        attributes.try_emplace(value,
                               category == "state" ? AttributeKind::kState : AttributeKind::kStatic);
      }
      for (const auto& a : o.affordances) attributes.try_emplace(a, AttributeKind::kAffordance);
    }
  }
  for (const auto& [scan, list] : relationships) {
    for (const auto& r : list) relation_names.insert(r.name);
  }
  std::vector<AttributeSpec> specs;
  for (const auto& [name, kind] : attributes) specs.push_back({name, kind});
  return Taxonomy("3rscan", {classes.begin(), classes.end()}, std::move(specs),
                  {relation_names.begin(), relation_names.end()});
}

std::optional<std::map<std::uint64_t, Vec3>> read_centroids(const fs::path& root,
                                                            const std::string& scan) {
  auto json = read_json(root / scan / "semseg.v2.json");
  if (!json) return std::nullopt;
  std::map<std::uint64_t, Vec3> out;
  for (const auto& group : json->at("segGroups")) {
    const auto& c = group.at("obb").at("centroid");
    out[id_value(group.at("objectId"))] =
        Vec3(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>());
  }
  return out;
}

}  // namespace

IngestResult ingest_3rscan_layout(const fs::path& root, const std::optional<Taxonomy>& taxonomy,
                                  const LabelConfig& labels, const SplitFractions& fractions,
                                  std::uint64_t split_seed) {
  IngestResult result;
  try {
    auto mapping = read_json(root / "3RScan.json");
    auto objects_json = read_json(root / "objects.json");
    if (!mapping || !objects_json) {
      if (!fs::exists(root) || !fs::is_empty(root)) {
        warn("'" + root.string() + "': missing 3RScan.json or objects.json; nothing ingested");
      }
      return result;
    }
    const auto objects = parse_objects(*objects_json);
    std::map<std::string, std::vector<RawRelationship>> relationships;
    if (auto rel_json = read_json(root / "relationships.json")) {
      relationships = parse_relationships(*rel_json);
    }
    result.taxonomy = taxonomy ? *taxonomy : derive_taxonomy(objects, relationships);
    const Taxonomy& tax = *result.taxonomy;

    std::set<std::string> mapped_scans;
    std::vector<const Json*> references;
    for (const auto& entry : *mapping) references.push_back(&entry);
    std::sort(references.begin(), references.end(), [](const Json* a, const Json* b) {
      return a->at("reference").get<std::string>() < b->at("reference").get<std::string>();
    });

    for (const auto* entry : references) {
      const auto env_id = entry->at("reference").get<std::string>();
      std::vector<std::pair<std::string, Eigen::Matrix4d>> scan_list;
      scan_list.emplace_back(env_id, Eigen::Matrix4d::Identity());
      if (auto it = entry->find("scans"); it != entry->end()) {
        for (const auto& rescan : *it) {
          Eigen::Matrix4d transform = Eigen::Matrix4d::Identity();
          if (auto t = rescan.find("transform"); t != rescan.end() && t->size() == 16) {
            std::vector<double> values = t->get<std::vector<double>>();
            transform = Eigen::Map<const Eigen::Matrix4d>(values.data());
          }
          scan_list.emplace_back(rescan.at("reference").get<std::string>(), transform);
        }
      }

      Environment env;
      env.id = env_id;
      for (const auto& [scan_id, transform] : scan_list) {
        mapped_scans.insert(scan_id);
        auto obj_it = objects.find(scan_id);
        if (obj_it == objects.end()) {
          warn("scan '" + scan_id + "' has no entry in objects.json; skipped");
          continue;
        }
        auto centroids = read_centroids(root, scan_id);
        if (!centroids) {
          warn("scan '" + scan_id + "' has no semseg.v2.json; skipped");
          continue;
        }
        std::vector<ObjectNode> nodes;
        std::set<std::uint64_t> present;
        for (const auto& o : obj_it->second) {
          auto c = centroids->find(o.id);
          if (c == centroids->end() || present.contains(o.id)) {
            ++result.report.skipped_objects;
            continue;
          }
          ObjectNode n;
          n.id.value = o.id;
          n.class_index = tax.class_index(o.label);
          for (const auto& [category, value] : o.attributes) {
            n.attribute_indices.push_back(tax.attribute_index(value));
          }
          for (const auto& a : o.affordances) n.attribute_indices.push_back(tax.attribute_index(a));
          std::sort(n.attribute_indices.begin(), n.attribute_indices.end());
          n.attribute_indices.erase(
              std::unique(n.attribute_indices.begin(), n.attribute_indices.end()),
              n.attribute_indices.end());
          n.position = (transform * c->second.homogeneous()).head<3>();
          present.insert(o.id);
          nodes.push_back(std::move(n));
        }
        std::sort(nodes.begin(), nodes.end(),
                  [](const auto& a, const auto& b) { return a.id < b.id; });
        std::vector<SemanticEdge> edges;
        std::set<std::tuple<std::uint64_t, std::uint64_t, std::size_t>> seen;
        if (auto rel_it = relationships.find(scan_id); rel_it != relationships.end()) {
          for (const auto& r : rel_it->second) {
            if (r.source == r.target || !present.contains(r.source) ||
                !present.contains(r.target)) {
              continue;
            }
            const auto rel = tax.relationship_index(r.name);
            if (seen.emplace(r.source, r.target, rel).second) {
              edges.push_back({ObjectId{r.source}, ObjectId{r.target}, rel});
            }
          }
        }
        SceneGraph::Header header{env_id, scan_id, static_cast<std::int64_t>(env.scans.size()),
                                  tax.name()};
        env.scans.emplace_back(std::move(header), std::move(nodes), std::move(edges), tax);
      }
      result.report.scans += env.scans.size();
      result.environments.push_back(std::move(env));
    }

    for (const auto& [scan_id, list] : objects) {
      if (!mapped_scans.contains(scan_id)) {
        warn("scan '" + scan_id + "' has no reference mapping; environment skipped");
        ++result.report.skipped_environments;
      }
    }
  } catch (const Json::exception& e) {
    throw ParseError(root.string() + ": malformed 3RScan export (" + e.what() + ")");
  }

  const auto splits = assign_splits(result.environments.size(), fractions, split_seed);
  for (std::size_t i = 0; i < result.environments.size(); ++i) {
    auto& env = result.environments[i];
    env.split = splits[i];
    auto samples = build_samples(env.scans, *result.taxonomy, labels);
    std::move(samples.begin(), samples.end(), std::back_inserter(result.samples));
  }
  result.report.environments = result.environments.size();
  result.report.samples = result.samples.size();
  result.report.label_stats = label_statistics(result.samples);
  return result;
}

}  // namespace vsg
