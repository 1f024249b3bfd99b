#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vsg {

enum class AttributeKind { kStatic, kState, kAffordance };

std::string_view to_string(AttributeKind kind);
AttributeKind attribute_kind_from_string(std::string_view name);

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::kStatic;

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

// Vocabulary of object classes, attributes and relationship types. The list
// order is canonical: indices are stable and used for all encodings.
// Immutable after construction.
class Taxonomy {
 public:
  Taxonomy(std::string name, std::vector<std::string> classes,
           std::vector<AttributeSpec> attributes,
           std::vector<std::string> relationships);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<AttributeSpec>& attributes() const { return attributes_; }
  const std::vector<std::string>& relationships() const { return relationships_; }

  std::size_t num_classes() const { return classes_.size(); }
  std::size_t num_attributes() const { return attributes_.size(); }
  std::size_t num_relationships() const { return relationships_.size(); }

  // Raw binary encoding width: one-hot class block plus attribute multi-hot.
  std::size_t encoding_dim() const { return classes_.size() + attributes_.size(); }

  // Name -> index lookups; throw TaxonomyError naming the missing symbol.
  std::size_t class_index(std::string_view name) const;
  std::size_t attribute_index(std::string_view name) const;
  std::size_t relationship_index(std::string_view name) const;

  std::optional<std::size_t> find_class(std::string_view name) const;

  bool is_state_attribute(std::size_t index) const {
    return attributes_.at(index).kind == AttributeKind::kState;
  }

  friend bool operator==(const Taxonomy& a, const Taxonomy& b) {
    return a.name_ == b.name_ && a.classes_ == b.classes_ &&
           a.attributes_ == b.attributes_ && a.relationships_ == b.relationships_;
  }

 private:
  std::string name_;
  std::vector<std::string> classes_;
  std::vector<AttributeSpec> attributes_;
  std::vector<std::string> relationships_;
  std::unordered_map<std::string, std::size_t> class_lookup_;
  std::unordered_map<std::string, std::size_t> attribute_lookup_;
  std::unordered_map<std::string, std::size_t> relationship_lookup_;
};

Taxonomy load_taxonomy(const std::filesystem::path& path);
void save_taxonomy(const Taxonomy& taxonomy, const std::filesystem::path& path);

std::string taxonomy_to_json_string(const Taxonomy& taxonomy);
Taxonomy taxonomy_from_json_string(std::string_view text);

}  // namespace vsg
