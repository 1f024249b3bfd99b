#include "vsg/taxonomy.hpp"

#include <algorithm>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "vsg/error.hpp"
#include "vsg/scene_graph_io.hpp"

namespace vsg {
namespace {

using Json = nlohmann::ordered_json;

template <typename Names>
std::unordered_map<std::string, std::size_t> build_lookup(
    const Names& names, const std::string& list_name,
    const std::string& taxonomy_name) {
  if (names.empty()) {
    throw TaxonomyError("taxonomy '" + taxonomy_name + "': " + list_name +
                        " list is empty");
  }
  std::unordered_map<std::string, std::size_t> lookup;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!lookup.emplace(names[i], i).second) {
      throw TaxonomyError("taxonomy '" + taxonomy_name + "': duplicate " +
                          list_name + " '" + names[i] + "'");
    }
  }
  return lookup;
}

std::size_t lookup_or_throw(const std::unordered_map<std::string, std::size_t>& table,
                            std::string_view name, const char* what,
                            const std::string& taxonomy_name) {
  auto it = table.find(std::string(name));
  if (it == table.end()) {
    throw TaxonomyError("unknown " + std::string(what) + " '" + std::string(name) +
                        "' in taxonomy '" + taxonomy_name + "'");
  }
  return it->second;
}

Json to_json(const Taxonomy& t) {
  Json attributes = Json::array();
  for (const auto& a : t.attributes()) {
    attributes.push_back({{"name", a.name}, {"kind", std::string(to_string(a.kind))}});
  }
  return Json{{"name", t.name()},
              {"classes", t.classes()},
              {"attributes", attributes},
              {"relationships", t.relationships()}};
}

Taxonomy from_json(const Json& j) {
  try {
    std::vector<AttributeSpec> attributes;
    for (const auto& a : j.at("attributes")) {
      attributes.push_back(
          {a.at("name").get<std::string>(),
           attribute_kind_from_string(a.at("kind").get<std::string>())});
    }
    return Taxonomy(j.at("name").get<std::string>(),
                    j.at("classes").get<std::vector<std::string>>(),
                    std::move(attributes),
                    j.at("relationships").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("taxonomy: ") + e.what());
  }
}

}  // namespace

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kStatic:
      return "static";
    case AttributeKind::kState:
      return "state";
    case AttributeKind::kAffordance:
      return "affordance";
  }
  return "static";
}

AttributeKind attribute_kind_from_string(std::string_view name) {
  if (name == "static") return AttributeKind::kStatic;
  if (name == "state") return AttributeKind::kState;
  if (name == "affordance") return AttributeKind::kAffordance;
  throw ParseError("unknown attribute kind '" + std::string(name) +
                   "' (expected static|state|affordance)");
}

Taxonomy::Taxonomy(std::string name, std::vector<std::string> classes,
                   std::vector<AttributeSpec> attributes,
                   std::vector<std::string> relationships)
    : name_(std::move(name)),
      classes_(std::move(classes)),
      attributes_(std::move(attributes)),
      relationships_(std::move(relationships)) {
  class_lookup_ = build_lookup(classes_, "class", name_);
  std::vector<std::string> attribute_names;
  attribute_names.reserve(attributes_.size());
  for (const auto& a : attributes_) attribute_names.push_back(a.name);
  attribute_lookup_ = build_lookup(attribute_names, "attribute", name_);
  relationship_lookup_ = build_lookup(relationships_, "relationship", name_);
  if (std::none_of(attributes_.begin(), attributes_.end(), [](const auto& a) {
        return a.kind == AttributeKind::kState;
      })) {
    throw TaxonomyError("taxonomy '" + name_ +
                        "' has no state attribute; state variability is undefined");
  }
}

std::size_t Taxonomy::class_index(std::string_view name) const {
  return lookup_or_throw(class_lookup_, name, "class", name_);
}

std::size_t Taxonomy::attribute_index(std::string_view name) const {
  return lookup_or_throw(attribute_lookup_, name, "attribute", name_);
}

std::size_t Taxonomy::relationship_index(std::string_view name) const {
  return lookup_or_throw(relationship_lookup_, name, "relationship", name_);
}

std::optional<std::size_t> Taxonomy::find_class(std::string_view name) const {
  auto it = class_lookup_.find(std::string(name));
  if (it == class_lookup_.end()) return std::nullopt;
  return it->second;
}

std::string taxonomy_to_json_string(const Taxonomy& taxonomy) {
  return to_json(taxonomy).dump(2) + "\n";
}

Taxonomy taxonomy_from_json_string(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("taxonomy: ") + e.what());
  }
  return from_json(j);
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  return taxonomy_from_json_string(read_text_file(path));
}

void save_taxonomy(const Taxonomy& taxonomy, const std::filesystem::path& path) {
  write_text_file(path, taxonomy_to_json_string(taxonomy));
}

}  // namespace vsg
