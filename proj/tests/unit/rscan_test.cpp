#include <gtest/gtest.h>

#include <filesystem>

#include "test_support.hpp"
#include "vsg/log.hpp"
#include "vsg/rscan.hpp"

namespace vsg {
namespace {

const std::filesystem::path kFixture = std::filesystem::path(VSG_FIXTURE_DIR) / "rscan_mini";

TEST(RscanIngest, MiniFixture) {
  ScopedWarningCapture capture;
  const auto result = ingest_3rscan_layout(kFixture, std::nullopt, {}, {0.5, 0.5, 0.0}, 1);
  ASSERT_TRUE(result.taxonomy.has_value());
  const auto& t = *result.taxonomy;
  EXPECT_EQ(t.name(), "3rscan");
  EXPECT_TRUE(t.is_state_attribute(t.attribute_index("on")));
  EXPECT_FALSE(t.is_state_attribute(t.attribute_index("wooden")));
  EXPECT_EQ(t.attributes()[t.attribute_index("sitting")].kind, AttributeKind::kAffordance);

  EXPECT_EQ(result.report.environments, 2u);
  EXPECT_EQ(result.report.scans, 4u);
  EXPECT_EQ(result.report.samples, 4u);
  EXPECT_EQ(result.samples.size(), 4u);
  EXPECT_EQ(result.report.skipped_objects, 1u);

  const auto& env_a = result.environments[0];
  ASSERT_EQ(env_a.scans.size(), 2u);
  EXPECT_EQ(env_a.scans[0].scan_id(), "ref_a");
  // Rescan centroids land in the reference frame.
  EXPECT_EQ(env_a.scans[1].node(ObjectId{1}).position, env_a.scans[0].node(ObjectId{1}).position);
  EXPECT_EQ(env_a.scans[0].num_edges(), 2u);

  const auto labels = compute_labels(env_a.scans[0], env_a.scans[1], t, {});
  EXPECT_FALSE(labels.at(ObjectId{1}).position);
  EXPECT_TRUE(labels.at(ObjectId{2}).state);
  EXPECT_FALSE(labels.at(ObjectId{2}).position);
  EXPECT_TRUE(labels.at(ObjectId{3}).instance);

  const auto& env_b = result.environments[1];
  const auto moved = compute_labels(env_b.scans[0], env_b.scans[1], t, {});
  EXPECT_TRUE(moved.at(ObjectId{4}).position);
  EXPECT_FALSE(moved.at(ObjectId{5}).position);
}

TEST(RscanIngest, UsesSuppliedTaxonomy) {
  const auto first = ingest_3rscan_layout(kFixture, std::nullopt, {}, {}, 1);
  ASSERT_TRUE(first.taxonomy.has_value());
  const auto again = ingest_3rscan_layout(kFixture, first.taxonomy, {}, {}, 1);
  EXPECT_EQ(*again.taxonomy, *first.taxonomy);
  EXPECT_EQ(again.report.samples, first.report.samples);
}

TEST(RscanIngest, EmptyOrMissingDirectoryYieldsNothing) {
  testing::TempDir dir;
  ScopedWarningCapture capture;
  const auto empty = ingest_3rscan_layout(dir.path(), std::nullopt, {}, {}, 1);
  EXPECT_FALSE(empty.taxonomy.has_value());
  EXPECT_TRUE(empty.samples.empty());
  const auto missing = ingest_3rscan_layout(dir / "absent", std::nullopt, {}, {}, 1);
  EXPECT_TRUE(missing.environments.empty());
}

}  // namespace
}  // namespace vsg
