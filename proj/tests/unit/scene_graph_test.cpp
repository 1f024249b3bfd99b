#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vsg/error.hpp"
#include "vsg/scene_graph.hpp"

namespace vsg {
namespace {

using testing::make_graph;
using testing::make_node;
using testing::small_taxonomy;

TEST(SceneGraph, LookupAndRelativePosition) {
  const auto t = small_taxonomy();
  const auto g = make_graph(t, {make_node(5, 0, {0}, {1, 2, 3}), make_node(9, 2, {}, {4, 6, 3})},
                            {{ObjectId{9}, ObjectId{5}, 0}});
  ASSERT_EQ(g.num_nodes(), 2u);
  EXPECT_EQ(g.find(ObjectId{9}), 1u);
  EXPECT_FALSE(g.find(ObjectId{7}).has_value());
  EXPECT_THROW((void)g.node(ObjectId{7}), LookupError);
  EXPECT_EQ(relative_position(g, ObjectId{5}, ObjectId{9}), Vec3(3, 4, 0));
}

TEST(SceneGraph, AttributesAreSorted) {
  const auto t = small_taxonomy();
  const auto g = make_graph(t, {make_node(1, 1, {3, 0, 1}, {0, 0, 0})});
  EXPECT_EQ(g.nodes()[0].attribute_indices, (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_TRUE(g.nodes()[0].has_attribute(3));
  EXPECT_FALSE(g.nodes()[0].has_attribute(2));
}

TEST(SceneGraph, RejectsInvalidContent) {
  const auto t = small_taxonomy();
  const Vec3 o = Vec3::Zero();
  EXPECT_THROW(make_graph(t, {make_node(1, 0, {}, o), make_node(1, 1, {}, o)}), GraphError);
  EXPECT_THROW(make_graph(t, {make_node(1, 7, {}, o)}), TaxonomyError);
  EXPECT_THROW(make_graph(t, {make_node(1, 0, {9}, o)}), TaxonomyError);
  EXPECT_THROW(make_graph(t, {make_node(1, 0, {1, 1}, o)}), GraphError);
  EXPECT_THROW(make_graph(t, {make_node(1, 0, {}, {std::nan(""), 0, 0})}), GraphError);
  EXPECT_THROW(make_graph(t, {make_node(1, 0, {}, o)}, {{ObjectId{1}, ObjectId{1}, 0}}),
               GraphError);
  EXPECT_THROW(make_graph(t, {make_node(1, 0, {}, o)}, {{ObjectId{1}, ObjectId{2}, 0}}),
               GraphError);
  EXPECT_THROW(make_graph(t, {make_node(1, 0, {}, o), make_node(2, 0, {}, o)},
                          {{ObjectId{1}, ObjectId{2}, 5}}),
               TaxonomyError);
  EXPECT_THROW(SceneGraph({"env", "s", 0, "other"}, {}, {}, t), TaxonomyError);
}

TEST(SceneGraph, MapTaxonomyRemapsClassesOnly) {
  const auto t = small_taxonomy();
  const Taxonomy coarse("coarse", {"furniture", "object"}, t.attributes(), t.relationships());
  const auto g = make_graph(t, {make_node(1, 0, {0}, {1, 1, 1}), make_node(2, 2, {1}, {2, 2, 2})},
                            {{ObjectId{2}, ObjectId{1}, 0}});
  const ClassMapping mapping{{0, 0}, {1, 0}, {2, 1}, {3, 1}};
  const auto mapped = map_taxonomy(g, mapping, coarse);
  EXPECT_EQ(mapped.taxonomy_name(), "coarse");
  EXPECT_EQ(mapped.nodes()[0].class_index, 0u);
  EXPECT_EQ(mapped.nodes()[1].class_index, 1u);
  EXPECT_EQ(mapped.nodes()[1].position, g.nodes()[1].position);
  EXPECT_EQ(mapped.semantic_edges(), g.semantic_edges());
  EXPECT_THROW(map_taxonomy(g, ClassMapping{{0, 0}}, coarse), MappingError);
}

}  // namespace
}  // namespace vsg
