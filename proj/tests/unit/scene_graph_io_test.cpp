#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vsg/error.hpp"
#include "vsg/scene_graph_io.hpp"

namespace vsg {
namespace {

using testing::small_taxonomy;

TEST(SceneGraphIo, RoundTripIsBitExact) {
  const auto t = small_taxonomy();
  nn::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testing::random_graph(t, rng, 10);
    const auto text = format_scene_graph(g, t);
    const auto back = parse_scene_graph(text, t);
    EXPECT_EQ(back, g);
    EXPECT_EQ(format_scene_graph(back, t), text);
  }
}

TEST(SceneGraphIo, FileRoundTrip) {
  testing::TempDir dir;
  const auto t = small_taxonomy();
  nn::Rng rng(4);
  const auto g = testing::random_graph(t, rng, 6);
  save_scene_graph(g, t, dir / "g.json");
  EXPECT_EQ(load_scene_graph(dir / "g.json", t), g);
}

TEST(SceneGraphIo, ParseErrorsNameTheField) {
  const auto t = small_taxonomy();
  const std::string good = R"({"format_version":1,"environment_id":"e","scan_id":"s","timestamp":0,
    "taxonomy":"test-home","nodes":[{"id":1,"class":"cup","attributes":[],"position":[0,0,0]}],"edges":[]})";
  EXPECT_NO_THROW(parse_scene_graph(good, t));

  auto expect_parse_error = [&](const std::string& text, const std::string& needle) {
    try {
      (void)parse_scene_graph(text, t);
      FAIL() << "expected ParseError for " << text;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_parse_error(R"({"format_version":1)", "malformed");
  expect_parse_error(R"({"format_version":2,"environment_id":"e"})", "format_version");
  std::string bad_position = good;
  bad_position.replace(bad_position.find("[0,0,0]"), 7, "[0,0]");
  expect_parse_error(bad_position, "nodes[0].position");
  std::string no_class = good;
  no_class.replace(no_class.find("\"class\""), 7, "\"klass\"");
  expect_parse_error(no_class, "class");
}

TEST(SceneGraphIo, UnknownSymbolsAreTaxonomyErrors) {
  const auto t = small_taxonomy();
  const std::string text = R"({"format_version":1,"environment_id":"e","scan_id":"s","timestamp":0,
    "taxonomy":"test-home","nodes":[{"id":1,"class":"rocket","attributes":[],"position":[0,0,0]}],"edges":[]})";
  EXPECT_THROW(parse_scene_graph(text, t), TaxonomyError);
  std::string other = text;
  other.replace(other.find("test-home"), 9, "elsewhere");
  EXPECT_THROW(parse_scene_graph(other, t), TaxonomyError);
}

TEST(SceneGraphIo, AnnotationsAreAppendedPerNode) {
  const auto t = small_taxonomy();
  const auto g = testing::make_graph(t, {testing::make_node(1, 2, {}, {0, 0, 0})});
  const auto text = format_scene_graph(g, t, {{{"p_position", 0.25}}}, "variability");
  EXPECT_NE(text.find("\"variability\""), std::string::npos);
  EXPECT_NE(text.find("0.25"), std::string::npos);
  EXPECT_EQ(parse_scene_graph(text, t), g);
  EXPECT_THROW(format_scene_graph(g, t, {}, "variability"), DimensionError);
}

TEST(SceneGraphIo, MissingFileIsIoError) {
  EXPECT_THROW(read_text_file("/nonexistent/dir/file.json"), IoError);
}

}  // namespace
}  // namespace vsg
