#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vsg/error.hpp"
#include "vsg/taxonomy.hpp"

namespace vsg {
namespace {

using testing::small_taxonomy;

TEST(Taxonomy, IndicesFollowListOrder) {
  const auto t = small_taxonomy();
  EXPECT_EQ(t.class_index("table"), 0u);
  EXPECT_EQ(t.class_index("lamp"), 3u);
  EXPECT_EQ(t.attribute_index("off"), 2u);
  EXPECT_EQ(t.relationship_index("close by"), 1u);
  EXPECT_EQ(t.encoding_dim(), 8u);
  EXPECT_TRUE(t.is_state_attribute(1));
  EXPECT_FALSE(t.is_state_attribute(0));
  EXPECT_FALSE(t.is_state_attribute(3));
}

TEST(Taxonomy, UnknownNameIsReported) {
  const auto t = small_taxonomy();
  try {
    (void)t.class_index("spaceship");
    FAIL() << "expected TaxonomyError";
  } catch (const TaxonomyError& e) {
    EXPECT_NE(std::string(e.what()).find("spaceship"), std::string::npos);
    EXPECT_EQ(e.kind(), "taxonomy");
  }
  EXPECT_FALSE(t.find_class("spaceship").has_value());
  EXPECT_THROW((void)t.attribute_index("shiny"), TaxonomyError);
  EXPECT_THROW((void)t.relationship_index("inside"), TaxonomyError);
}

TEST(Taxonomy, RejectsDuplicatesAndMissingStates) {
  EXPECT_THROW(Taxonomy("t", {"a", "a"}, {{"on", AttributeKind::kState}}, {"r"}),
               TaxonomyError);
  EXPECT_THROW(Taxonomy("t", {"a"}, {{"wooden", AttributeKind::kStatic}}, {"r"}),
               TaxonomyError);
  EXPECT_THROW(Taxonomy("t", {}, {{"on", AttributeKind::kState}}, {"r"}), TaxonomyError);
}

TEST(Taxonomy, JsonRoundTrip) {
  const auto t = small_taxonomy();
  const auto text = taxonomy_to_json_string(t);
  const auto back = taxonomy_from_json_string(text);
  EXPECT_EQ(back, t);
  EXPECT_EQ(taxonomy_to_json_string(back), text);
}

TEST(Taxonomy, MalformedJsonIsParseError) {
  EXPECT_THROW(taxonomy_from_json_string("{\"name\": 3"), ParseError);
  EXPECT_THROW(taxonomy_from_json_string(
                   R"({"name":"t","classes":["a"],"attributes":[{"name":"x","kind":"weird"}],"relationships":["r"]})"),
               ParseError);
}

TEST(Taxonomy, FileRoundTrip) {
  testing::TempDir dir;
  const auto t = small_taxonomy();
  save_taxonomy(t, dir / "taxonomy.json");
  EXPECT_EQ(load_taxonomy(dir / "taxonomy.json"), t);
  EXPECT_THROW(load_taxonomy(dir / "missing.json"), IoError);
}

}  // namespace
}  // namespace vsg
