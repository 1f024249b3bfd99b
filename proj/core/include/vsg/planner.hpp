#pragma once

// Active change detection on a previously mapped scene. A robot moves from
// object to object (straight Euclidean legs) and checks whether each visited
// object changed, until it has found n changes.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vsg/dataset.hpp"
#include "vsg/model.hpp"
#include "vsg/scene_graph.hpp"

namespace vsg {

inline constexpr std::size_t kExactTspLimit = 15;

// Length of the open path start -> points[order[0]] -> points[order[1]] ...
double path_length(std::span<const Vec3> points, std::span<const std::size_t> order,
                   const Vec3& start);

// Open-path TSP from a fixed start. Held-Karp for up to kExactTspLimit points,
// the heuristic otherwise. Ties are broken by point index.
std::vector<std::size_t> solve_tsp(std::span<const Vec3> points, const Vec3& start);
std::vector<std::size_t> solve_tsp_exact(std::span<const Vec3> points, const Vec3& start);
// Nearest neighbour paths from every possible first point, each refined by
// 2-opt and Or-opt moves until no move shortens it. Returns the shortest.
std::vector<std::size_t> solve_tsp_heuristic(std::span<const Vec3> points, const Vec3& start);

struct Episode {
  SceneGraph previous_map;
  SceneGraph realized_scene;
  std::size_t n = 1;
  Vec3 start = Vec3::Zero();
};

// Episode starting at the centroid of the previous map.
Episode make_episode(SceneGraph previous_map, SceneGraph realized_scene, std::size_t n);

// Ids of previous-map objects with any positive variability label.
std::vector<ObjectId> changed_objects(const Episode& episode, const Taxonomy& taxonomy,
                                      const LabelConfig& labels = {});

struct EpisodeResult {
  std::string planner;
  std::vector<ObjectId> visit_order;
  double distance = 0.0;
  std::size_t changes_found = 0;
  bool fallback_used = false;
  bool infeasible = false;
};

EpisodeResult run_coverage(const Episode& episode, const Taxonomy& taxonomy,
                           const LabelConfig& labels = {});

// `scores` is aligned with episode.previous_map.nodes(). Visits the n + 3
// best scored objects (ties to the lower id) first, then falls back to a
// coverage tour of the remaining objects from the current position.
EpisodeResult run_vsg_planner(const Episode& episode, std::span<const double> scores,
                              const Taxonomy& taxonomy, const LabelConfig& labels = {});
// Scores each object by its largest predicted variability probability.
EpisodeResult run_vsg_planner(const Episode& episode, const VsgModel& model,
                              const LabelConfig& labels = {});

std::vector<double> variability_scores(const VsgModel& model, const SceneGraph& graph);

// Replays a visit order with an independent distance accumulator.
double replay_distance(const Episode& episode, std::span<const ObjectId> visit_order);

using Scorer = std::function<std::vector<double>(const Episode&)>;
Scorer model_scorer(const VsgModel& model);
// 1 for changed objects, 0 otherwise.
Scorer oracle_scorer(const Taxonomy& taxonomy, const LabelConfig& labels = {});

struct BenchmarkRow {
  std::size_t n = 0;
  std::string planner;
  double mean_distance = 0.0;
  double std_distance = 0.0;  // sample standard deviation
  double win_fraction = 0.0;  // episodes where this planner is strictly shorter
  // Reduction of the mean distance: 1 - mean(d_planner) / mean(d_coverage).
  double speedup = 0.0;
  // Mean over episodes of (d_coverage - d_planner) / d_coverage.
  double episode_speedup = 0.0;
  std::size_t episodes = 0;
};

struct BenchmarkSummary {
  std::vector<BenchmarkRow> rows;  // per n: coverage then vsg
  std::size_t episodes = 0;        // feasible episodes
  std::size_t infeasible = 0;
  double win_fraction = 0.0;       // VSG-Planner strictly shorter
  double speedup = 0.0;            // 1 - mean(d_vsg) / mean(d_coverage)
  double episode_speedup = 0.0;    // mean of per-episode relative reductions
  std::vector<EpisodeResult> coverage_results;
  std::vector<EpisodeResult> vsg_results;
};

// Infeasible episodes are counted but excluded from the statistics.
BenchmarkSummary run_benchmark(std::span<const Episode> episodes, const Taxonomy& taxonomy,
                               const Scorer& scorer, const LabelConfig& labels = {});

// Columns: n, planner, mean_distance, std_distance, win_fraction, speedup.
// A final row with n = "all" summarises every feasible episode.
std::string format_benchmark_csv(const BenchmarkSummary& summary);

// For every n in [n_min, n_max], `per_n` episodes from random ordered scan
// pairs of environments in `split`, retrying pairs with fewer than n
// changes. Throws ConfigError when the split has no environment with two
// scans.
std::vector<Episode> sample_episodes(const Dataset& dataset, Split split, std::size_t n_min,
                                     std::size_t n_max, std::size_t per_n, std::uint64_t seed,
                                     const LabelConfig& labels = {});

}  // namespace vsg
