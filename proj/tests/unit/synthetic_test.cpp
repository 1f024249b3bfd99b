#include <gtest/gtest.h>

#include <filesystem>

#include "test_support.hpp"
#include "vsg/error.hpp"
#include "vsg/scene_graph_io.hpp"
#include "vsg/synthetic.hpp"

namespace vsg {
namespace {

GeneratorSpec small_spec() {
  GeneratorSpec spec(testing::small_taxonomy());
  ClassPropensity table{"table", ObjectRole::kSupport, 1, 2};
  table.attributes = {"wooden"};
  ClassPropensity chair{"chair", ObjectRole::kFurniture, 1, 3};
  chair.move_probability = 0.3;
  chair.attributes = {"sitting"};
  ClassPropensity cup{"cup", ObjectRole::kHandheld, 2, 4};
  cup.support_fraction = 0.6;
  cup.move_probability = 0.8;
  cup.unsupported_move_probability = 0.1;
  cup.remove_probability = 0.1;
  ClassPropensity lamp{"lamp", ObjectRole::kFurniture, 1, 2};
  lamp.states = {"on", "off"};
  lamp.toggle_probability = 0.5;
  spec.classes = {table, chair, cup, lamp};
  spec.num_scans = 4;
  spec.num_environments = 10;
  return spec;
}

TEST(Synthetic, LabelsAgreeWithChangeLog) {
  const auto spec = small_spec();
  const auto& t = spec.taxonomy;
  nn::Rng rng(70);
  for (int trial = 0; trial < 25; ++trial) {
    const auto seq = generate_synthetic_scene_sequence(spec, "env", rng);
    ASSERT_EQ(seq.scans.size(), spec.num_scans);
    for (std::size_t i = 0; i < seq.scans.size(); ++i) {
      for (std::size_t j = 0; j < seq.scans.size(); ++j) {
        EXPECT_EQ(compute_labels(seq.scans[i], seq.scans[j], t, {}),
                  labels_from_change_log(seq.log, i, j, {}));
      }
    }
  }
}

TEST(Synthetic, AdjacentEventsExplainLabels) {
  const auto spec = small_spec();
  nn::Rng rng(71);
  const auto seq = generate_synthetic_scene_sequence(spec, "env", rng);
  for (std::size_t k = 0; k + 1 < seq.scans.size(); ++k) {
    const auto labels = compute_labels(seq.scans[k], seq.scans[k + 1], spec.taxonomy, {});
    for (const auto& [id, l] : labels) {
      bool removed = false;
      bool toggled = false;
      for (const auto& e : seq.log.transitions[k].events) {
        if (e.id != id) continue;
        removed = removed || e.type == ChangeEvent::Type::kRemoved;
        toggled = toggled || e.type == ChangeEvent::Type::kStateChanged;
      }
      EXPECT_EQ(l.instance, removed);
      EXPECT_EQ(l.state, toggled);
    }
  }
}

TEST(Synthetic, ReplayReproducesEveryScan) {
  const auto spec = small_spec();
  nn::Rng rng(72);
  const auto seq = generate_synthetic_scene_sequence(spec, "env", rng);
  const auto replayed = replay_change_log(seq.log);
  ASSERT_EQ(replayed.size(), seq.scans.size());
  for (std::size_t k = 0; k < seq.scans.size(); ++k) {
    ASSERT_EQ(replayed[k].size(), seq.scans[k].num_nodes());
    for (std::size_t i = 0; i < replayed[k].size(); ++i) {
      const auto& node = seq.scans[k].nodes()[i];
      EXPECT_EQ(replayed[k][i].id, node.id);
      EXPECT_EQ(replayed[k][i].position, node.position);
    }
  }
}

TEST(Synthetic, ZeroPropensityMeansNoChange) {
  auto spec = small_spec();
  for (auto& c : spec.classes) {
    c.move_probability = 0.0;
    c.unsupported_move_probability = 0.0;
    c.toggle_probability = 0.0;
    c.remove_probability = 0.0;
  }
  nn::Rng rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    const auto seq = generate_synthetic_scene_sequence(spec, "env", rng);
    for (std::size_t j = 1; j < seq.scans.size(); ++j) {
      for (const auto& [id, l] : compute_labels(seq.scans[0], seq.scans[j], spec.taxonomy, {})) {
        EXPECT_FALSE(l.position || l.state || l.instance);
      }
    }
  }
}

TEST(Synthetic, SupportedObjectsAreLinkedToTheirSupport) {
  const auto spec = small_spec();
  nn::Rng rng(74);
  const auto seq = generate_synthetic_scene_sequence(spec, "env", rng);
  const auto relation = spec.taxonomy.relationship_index(spec.support_relation);
  for (const auto& scan : seq.scans) {
    for (const auto& e : scan.semantic_edges()) {
      EXPECT_EQ(e.relation_index, relation);
      EXPECT_EQ(scan.node(e.target).class_index, spec.taxonomy.class_index("table"));
      EXPECT_EQ(scan.node(e.source).class_index, spec.taxonomy.class_index("cup"));
      const Vec3 d = scan.node(e.source).position - scan.node(e.target).position;
      EXPECT_LT(d.head<2>().norm(), 1.0);
    }
  }
}

TEST(Synthetic, InfeasibleRoomIsGeneratorError) {
  auto spec = small_spec();
  spec.room_width = 2.0;
  spec.room_depth = 2.0;
  spec.classes[1].min_count = 40;
  spec.classes[1].max_count = 40;
  nn::Rng rng(75);
  EXPECT_THROW(generate_synthetic_scene_sequence(spec, "env", rng), GeneratorError);
}

TEST(Synthetic, ValidationRejectsBadSpecs) {
  nn::Rng rng(76);
  auto spec = small_spec();
  spec.classes[1].move_probability = 1.5;
  EXPECT_THROW(generate_synthetic_scene_sequence(spec, "env", rng), GeneratorError);
  spec = small_spec();
  spec.classes[0].move_probability = 0.5;
  EXPECT_THROW(generate_synthetic_scene_sequence(spec, "env", rng), GeneratorError);
  spec = small_spec();
  spec.classes[3].states = {"wooden"};
  EXPECT_THROW(generate_synthetic_scene_sequence(spec, "env", rng), GeneratorError);
  spec = small_spec();
  spec.classes[2].min_count = 5;
  spec.classes[2].max_count = 1;
  EXPECT_THROW(generate_synthetic_scene_sequence(spec, "env", rng), GeneratorError);
}

TEST(Synthetic, SpecTextRoundTrip) {
  const auto spec = small_spec();
  const auto text = format_generator_spec(spec);
  const auto back = parse_generator_spec(text);
  EXPECT_EQ(format_generator_spec(back), text);
  EXPECT_THROW(parse_generator_spec("{"), ParseError);
  EXPECT_THROW(object_role_from_string("wizard"), ParseError);
}

TEST(Synthetic, ShippedSpecLoads) {
  const auto spec = load_generator_spec(std::filesystem::path(VSG_CONFIG_DIR) /
                                        "synthetic_generator.json");
  EXPECT_EQ(spec.num_environments, 100u);
  EXPECT_EQ(spec.num_scans, 3u);
  nn::Rng rng(77);
  EXPECT_NO_THROW(generate_synthetic_scene_sequence(spec, "env", rng));
}

TEST(Synthetic, DatasetIsDeterministicPerSeed) {
  const auto spec = small_spec();
  const auto a = generate_synthetic_dataset(spec, 3);
  const auto b = generate_synthetic_dataset(spec, 3);
  const auto c = generate_synthetic_dataset(spec, 4);
  ASSERT_EQ(a.dataset.environments.size(), 10u);
  for (std::size_t e = 0; e < 10; ++e) {
    EXPECT_EQ(a.dataset.environments[e].scans, b.dataset.environments[e].scans);
    EXPECT_EQ(a.dataset.environments[e].split, b.dataset.environments[e].split);
  }
  EXPECT_NE(a.dataset.environments[0].scans, c.dataset.environments[0].scans);
  EXPECT_EQ(format_change_log(a.logs[0], spec.taxonomy), format_change_log(b.logs[0], spec.taxonomy));
}

TEST(Synthetic, SaveWritesDatasetAndLogs) {
  const auto spec = small_spec();
  const auto data = generate_synthetic_dataset(spec, 5);
  testing::TempDir dir;
  save_synthetic_dataset(data, dir.path());
  const auto loaded = load_dataset(dir.path());
  ASSERT_EQ(loaded.environments.size(), data.dataset.environments.size());
  EXPECT_EQ(loaded.environments[0].scans, data.dataset.environments[0].scans);
  const auto log_path = dir.path() / data.dataset.environments[0].id / "changes.json";
  ASSERT_TRUE(std::filesystem::exists(log_path));
  EXPECT_EQ(read_text_file(log_path), format_change_log(data.logs[0], spec.taxonomy));
}

}  // namespace
}  // namespace vsg
