#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "model_support.hpp"
#include "oracles.hpp"
#include "planner_support.hpp"
#include "test_support.hpp"
#include "vsg/error.hpp"
#include "vsg/planner.hpp"
#include "vsg/synthetic.hpp"

namespace vsg {
namespace {

using testing::make_graph;
using testing::make_node;
using testing::small_taxonomy;

std::vector<Vec3> random_points(nn::Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(coord(rng), coord(rng), 0.0);
  return pts;
}

bool is_permutation_of_indices(const std::vector<std::size_t>& order, std::size_t n) {
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> expected(n);
  std::iota(expected.begin(), expected.end(), 0);
  return sorted == expected;
}

TEST(Tsp, PathLength) {
  const std::vector<Vec3> pts{{3, 4, 0}, {3, 0, 0}};
  const std::vector<std::size_t> order{0, 1};
  EXPECT_DOUBLE_EQ(path_length(pts, order, Vec3::Zero()), 9.0);
}

TEST(Tsp, ExactMatchesBruteForce) {
  nn::Rng rng(90);
  for (std::size_t n = 0; n <= 8; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto pts = random_points(rng, n);
      const Vec3 start(5, 5, 0);
      const auto order = solve_tsp_exact(pts, start);
      ASSERT_TRUE(is_permutation_of_indices(order, n));
      const auto [best, best_order] = oracle::brute_force_tsp(pts, start);
      EXPECT_NEAR(path_length(pts, order, start), n == 0 ? 0.0 : best, 1e-9);
    }
  }
  EXPECT_THROW(solve_tsp_exact(random_points(rng, 21), Vec3::Zero()), ConfigError);
}

TEST(Tsp, HeuristicNearOptimal) {
  nn::Rng rng(91);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_points(rng, 10);
    const auto exact = path_length(pts, solve_tsp_exact(pts, Vec3::Zero()), Vec3::Zero());
    const auto order = solve_tsp_heuristic(pts, Vec3::Zero());
    ASSERT_TRUE(is_permutation_of_indices(order, 10));
    EXPECT_LE(path_length(pts, order, Vec3::Zero()), 1.05 * exact + 1e-9);
  }
}

TEST(Tsp, LargeInstancesUseHeuristic) {
  nn::Rng rng(92);
  const auto pts = random_points(rng, 40);
  const auto order = solve_tsp(pts, Vec3::Zero());
  EXPECT_TRUE(is_permutation_of_indices(order, 40));
  EXPECT_EQ(order, solve_tsp_heuristic(pts, Vec3::Zero()));
}

TEST(Tsp, CollinearPointsAreVisitedInOrder) {
  const std::vector<Vec3> pts{{3, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  EXPECT_EQ(solve_tsp(pts, Vec3::Zero()), (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_EQ(solve_tsp_heuristic(pts, Vec3::Zero()), (std::vector<std::size_t>{1, 2, 0}));
}

class LineFixture : public ::testing::Test {
 protected:
  Taxonomy t = small_taxonomy();
  // Objects at x = 1..4; object 3 (x = 3) and 4 (x = 4) disappear.
  Episode episode{make_graph(t,
                             {make_node(1, 0, {}, {1, 0, 0}), make_node(2, 0, {}, {2, 0, 0}),
                              make_node(3, 2, {}, {3, 0, 0}), make_node(4, 2, {}, {4, 0, 0})},
                             {}, "a"),
                  make_graph(t, {make_node(1, 0, {}, {1, 0, 0}), make_node(2, 0, {}, {2, 0, 0})},
                             {}, "b"),
                  1, Vec3::Zero()};
};

TEST_F(LineFixture, CoverageStopsAtNthChange) {
  const auto r = run_coverage(episode, t);
  EXPECT_EQ(r.visit_order, (std::vector<ObjectId>{{1}, {2}, {3}}));
  EXPECT_DOUBLE_EQ(r.distance, 3.0);
  EXPECT_EQ(r.changes_found, 1u);
  EXPECT_FALSE(r.infeasible);
  EXPECT_DOUBLE_EQ(replay_distance(episode, r.visit_order), r.distance);
  EXPECT_EQ(changed_objects(episode, t), (std::vector<ObjectId>{{3}, {4}}));
}

TEST_F(LineFixture, VsgVisitsTopScoresFirst) {
  const std::vector<double> scores{0.1, 0.2, 0.9, 0.8};
  const auto r = run_vsg_planner(episode, scores, t);
  // Top n + 3 = 4 covers everything; the tour still starts at the nearest.
  EXPECT_EQ(r.changes_found, 1u);
  EXPECT_DOUBLE_EQ(r.distance, 3.0);

  Episode two = episode;
  two.n = 2;
  EXPECT_DOUBLE_EQ(run_vsg_planner(two, scores, t).distance, 4.0);
  Episode three = episode;
  three.n = 3;
  const auto infeasible = run_vsg_planner(three, scores, t);
  EXPECT_TRUE(infeasible.infeasible);
  EXPECT_EQ(infeasible.changes_found, 2u);
  EXPECT_EQ(infeasible.visit_order.size(), 4u);
  EXPECT_THROW(run_vsg_planner(episode, std::vector<double>{1.0}, t), DimensionError);
}

TEST(VsgPlanner, TiesGoToLowerIdAndFallbackCoversTheRest) {
  const auto t = small_taxonomy();
  std::vector<ObjectNode> before;
  std::vector<ObjectNode> after;
  for (std::uint64_t id = 1; id <= 8; ++id) {
    before.push_back(make_node(id, 0, {}, {static_cast<double>(id), 0, 0}));
    if (id != 8) after.push_back(make_node(id, 0, {}, {static_cast<double>(id), 0, 0}));
  }
  Episode ep{make_graph(t, before, {}, "a"), make_graph(t, after, {}, "b"), 1, Vec3::Zero()};
  const std::vector<double> uniform(8, 0.5);
  const auto r = run_vsg_planner(ep, uniform, t);
  // Top 4 by id: 1..4, then fallback 5..8.
  EXPECT_TRUE(r.fallback_used);
  EXPECT_EQ(r.visit_order.front(), ObjectId{1});
  EXPECT_EQ(r.visit_order.back(), ObjectId{8});
  EXPECT_DOUBLE_EQ(r.distance, 8.0);
  EXPECT_DOUBLE_EQ(replay_distance(ep, r.visit_order), r.distance);
}

TEST(VsgPlanner, OracleWinsEverySeparableEpisode) {
  const auto t = small_taxonomy();
  nn::Rng rng(93);
  std::vector<Episode> episodes;
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int k = 0; k < 5; ++k) episodes.push_back(testing::separable_episode(t, rng, n));
  }
  const auto summary = run_benchmark(episodes, t, oracle_scorer(t));
  EXPECT_EQ(summary.episodes, episodes.size());
  EXPECT_DOUBLE_EQ(summary.win_fraction, 1.0);
  EXPECT_GT(summary.speedup, 0.0);
}

TEST(Benchmark, DistancesReplayAndCsvShape) {
  auto spec = load_generator_spec(std::filesystem::path(VSG_CONFIG_DIR) / "synthetic_generator.json");
  spec.num_environments = 10;
  const auto data = generate_synthetic_dataset(spec, 2);
  const auto episodes = sample_episodes(data.dataset, Split::kTrain, 1, 3, 3, 5);
  ASSERT_EQ(episodes.size(), 9u);
  const auto& t = data.dataset.taxonomy;
  const auto summary = run_benchmark(episodes, t, oracle_scorer(t));
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    for (const auto* r : {&summary.coverage_results[i], &summary.vsg_results[i]}) {
      EXPECT_NEAR(replay_distance(episodes[i], r->visit_order), r->distance, 1e-9);
      if (!r->infeasible) EXPECT_GE(r->changes_found, episodes[i].n);
    }
  }
  const auto csv = format_benchmark_csv(summary);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,planner,mean_distance,std_distance,win_fraction,speedup");
  EXPECT_NE(csv.find("\nall,vsg,"), std::string::npos);
  EXPECT_NE(csv.find("\n3,coverage,"), std::string::npos);

  auto model = testing::small_model(94);
  EXPECT_THROW(run_vsg_planner(episodes[0], model), CheckpointError);
  EXPECT_THROW(sample_episodes(data.dataset, Split::kTrain, 0, 2, 1, 0), ConfigError);
  EXPECT_THROW(make_episode(episodes[0].previous_map, episodes[0].realized_scene, 0), ConfigError);
}

TEST(Benchmark, UniformScoresStillFindChanges) {
  const auto t = small_taxonomy();
  nn::Rng rng(95);
  std::vector<Episode> episodes;
  for (int k = 0; k < 10; ++k) episodes.push_back(testing::separable_episode(t, rng, 2));
  const auto summary = run_benchmark(episodes, t, [](const Episode& ep) {
    return std::vector<double>(ep.previous_map.num_nodes(), 0.5);
  });
  for (const auto& r : summary.vsg_results) EXPECT_GE(r.changes_found, 2u);
}

}  // namespace
}  // namespace vsg
