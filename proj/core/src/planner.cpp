#include "vsg/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "vsg/error.hpp"

namespace vsg {
namespace {

constexpr double kImprovement = 1e-12;

// Walks `rows` of the previous map from `result`'s current position,
// stopping once n changes are found. Returns the final position.
Vec3 walk(const Episode& episode, const std::set<ObjectId>& changed,
          std::span<const std::size_t> rows, Vec3 position, EpisodeResult& result) {
  const auto& nodes = episode.previous_map.nodes();
  for (auto row : rows) {
    if (result.changes_found >= episode.n) break;
    result.distance += (nodes[row].position - position).norm();
    position = nodes[row].position;
    result.visit_order.push_back(nodes[row].id);
    if (changed.contains(nodes[row].id)) ++result.changes_found;
  }
  return position;
}

std::vector<std::size_t> tour_rows(const SceneGraph& graph, std::span<const std::size_t> subset,
                                   const Vec3& start) {
  std::vector<Vec3> pts;
  for (auto r : subset) pts.push_back(graph.nodes()[r].position);
  const auto order = solve_tsp(pts, start);
  std::vector<std::size_t> rows;
  for (auto k : order) rows.push_back(subset[k]);
  return rows;
}

std::set<ObjectId> changed_set(const Episode& episode, const Taxonomy& taxonomy,
                               const LabelConfig& labels) {
  const auto ids = changed_objects(episode, taxonomy, labels);
  return {ids.begin(), ids.end()};
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double path_length(std::span<const Vec3> points, std::span<const std::size_t> order,
                   const Vec3& start) {
  double total = 0.0;
  Vec3 at = start;
  for (auto i : order) {
    total += (points[i] - at).norm();
    at = points[i];
  }
  return total;
}

std::vector<std::size_t> solve_tsp(std::span<const Vec3> points, const Vec3& start) {
  return points.size() <= kExactTspLimit ? solve_tsp_exact(points, start)
                                         : solve_tsp_heuristic(points, start);
}

std::vector<std::size_t> solve_tsp_exact(std::span<const Vec3> points, const Vec3& start) {
  const std::size_t n = points.size();
  if (n == 0) return {};
  if (n > 20) throw ConfigError("Held-Karp is limited to 20 points");
  const std::size_t full = (std::size_t{1} << n) - 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost((full + 1) * n, kInf);
  std::vector<std::uint8_t> parent((full + 1) * n, 0);
  auto at = [n](std::size_t mask, std::size_t j) { return mask * n + j; };
  for (std::size_t j = 0; j < n; ++j) cost[at(std::size_t{1} << j, j)] = (points[j] - start).norm();
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      const double base = cost[at(mask, j)];
      if (base == kInf) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (mask & (std::size_t{1} << k)) continue;
        const std::size_t next = mask | (std::size_t{1} << k);
        const double c = base + (points[k] - points[j]).norm();
        if (c < cost[at(next, k)]) {
          cost[at(next, k)] = c;
          parent[at(next, k)] = static_cast<std::uint8_t>(j);
        }
      }
    }
  }
  std::size_t last = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (cost[at(full, j)] < cost[at(full, last)]) last = j;
  }
  std::vector<std::size_t> order;
  std::size_t mask = full;
  std::size_t j = last;
  while (true) {
    order.push_back(j);
    const std::size_t prev_mask = mask & ~(std::size_t{1} << j);
    if (prev_mask == 0) break;
    const std::size_t p = parent[at(mask, j)];
    mask = prev_mask;
    j = p;
  }
  std::reverse(order.begin(), order.end());
  return order;
}

namespace {

// Greedy path that visits `first` before anything else.
std::vector<std::size_t> nearest_neighbour_path(std::span<const Vec3> points, std::size_t first) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order{first};
  std::vector<bool> used(n, false);
  used[first] = true;
  Vec3 at = points[first];
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double d = (points[i] - at).norm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = true;
    order.push_back(best);
    at = points[best];
  }
  return order;
}

std::vector<std::size_t> local_search(std::span<const Vec3> points, const Vec3& start,
                                      std::vector<std::size_t> order) {
  const std::size_t n = points.size();
  auto pos = [&](std::size_t k) -> const Vec3& { return points[order[k]]; };
  auto before = [&](std::size_t k) -> const Vec3& { return k == 0 ? start : pos(k - 1); };
  bool improved = true;
  while (improved) {
    improved = false;
    // 2-opt: reverse order[i..j].
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec3& a = before(i);
        double delta = (pos(j) - a).norm() - (pos(i) - a).norm();
        if (j + 1 < n) delta += (pos(i) - pos(j + 1)).norm() - (pos(j) - pos(j + 1)).norm();
        if (delta < -kImprovement) {
          std::reverse(order.begin() + static_cast<long>(i), order.begin() + static_cast<long>(j) + 1);
          improved = true;
        }
      }
    }
    // Or-opt: move a segment of 1 to 3 points, optionally reversed.
    for (std::size_t len = 1; len <= 3 && len < n; ++len) {
      for (std::size_t i = 0; i + len <= n; ++i) {
        const Vec3 a = before(i);
        const Vec3 head = pos(i);
        const Vec3 tail = pos(i + len - 1);
        double removal = (head - a).norm();
        if (i + len < n) {
          removal += (pos(i + len) - tail).norm() - (pos(i + len) - a).norm();
        }
        std::vector<std::size_t> segment(order.begin() + static_cast<long>(i),
                                         order.begin() + static_cast<long>(i + len));
        std::vector<std::size_t> rest(order.begin(), order.begin() + static_cast<long>(i));
        rest.insert(rest.end(), order.begin() + static_cast<long>(i + len), order.end());
        bool moved = false;
        for (std::size_t at = 0; at <= rest.size() && !moved; ++at) {
          const Vec3& prev = at == 0 ? start : points[rest[at - 1]];
          for (bool reversed : {false, true}) {
            const Vec3& first = reversed ? tail : head;
            const Vec3& last = reversed ? head : tail;
            double insertion = (first - prev).norm();
            if (at < rest.size()) {
              const Vec3& next = points[rest[at]];
              insertion += (next - last).norm() - (next - prev).norm();
            }
            if (insertion - removal < -kImprovement) {
              if (reversed) std::reverse(segment.begin(), segment.end());
              rest.insert(rest.begin() + static_cast<long>(at), segment.begin(), segment.end());
              order = std::move(rest);
              improved = true;
              moved = true;
              break;
            }
          }
        }
      }
    }
  }
  return order;
}

}  // namespace


std::vector<std::size_t> solve_tsp_heuristic(std::span<const Vec3> points, const Vec3& start) {
  const std::size_t n = points.size();
  if (n == 0) return {};
  std::vector<std::size_t> best;
  double best_length = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> firsts(n);
  std::iota(firsts.begin(), firsts.end(), std::size_t{0});
  std::stable_sort(firsts.begin(), firsts.end(), [&](std::size_t a, std::size_t b) {
    return (points[a] - start).norm() < (points[b] - start).norm();
  });
  for (auto first : firsts) {
    auto order = local_search(points, start, nearest_neighbour_path(points, first));
    const double length = path_length(points, order, start);
    if (length < best_length - kImprovement) {
      best_length = length;
      best = std::move(order);
    }
  }
  return best;
}

Episode make_episode(SceneGraph previous_map, SceneGraph realized_scene, std::size_t n) {
  if (n == 0) throw ConfigError("an episode needs n >= 1");
  Vec3 centroid = Vec3::Zero();
  for (const auto& node : previous_map.nodes()) centroid += node.position;
  if (previous_map.num_nodes() > 0) centroid /= static_cast<double>(previous_map.num_nodes());
  return {std::move(previous_map), std::move(realized_scene), n, centroid};
}

std::vector<ObjectId> changed_objects(const Episode& episode, const Taxonomy& taxonomy,
                                      const LabelConfig& labels) {
  const auto map = compute_labels(episode.previous_map, episode.realized_scene, taxonomy, labels);
  std::vector<ObjectId> out;
  for (const auto& [id, l] : map) {
    if (l.position || l.state || l.instance) out.push_back(id);
  }
  return out;
}

EpisodeResult run_coverage(const Episode& episode, const Taxonomy& taxonomy,
                           const LabelConfig& labels) {
  const auto changed = changed_set(episode, taxonomy, labels);
  EpisodeResult result;
  result.planner = "coverage";
  result.infeasible = changed.size() < episode.n;
  std::vector<std::size_t> all(episode.previous_map.num_nodes());
  std::iota(all.begin(), all.end(), 0);
  const auto route = tour_rows(episode.previous_map, all, episode.start);
  walk(episode, changed, route, episode.start, result);
  return result;
}

EpisodeResult run_vsg_planner(const Episode& episode, std::span<const double> scores,
                              const Taxonomy& taxonomy, const LabelConfig& labels) {
  const auto& graph = episode.previous_map;
  if (scores.size() != graph.num_nodes()) {
    throw DimensionError("run_vsg_planner: one score per previous-map object is required");
  }
  const auto changed = changed_set(episode, taxonomy, labels);
  EpisodeResult result;
  result.planner = "vsg";
  result.infeasible = changed.size() < episode.n;

  // Nodes are stored in id order, so a stable sort breaks ties by id.
  std::vector<std::size_t> ranked(graph.num_nodes());
  std::iota(ranked.begin(), ranked.end(), 0);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](auto a, auto b) { return scores[a] > scores[b]; });
  const std::size_t k = std::min(ranked.size(), episode.n + 3);
  std::vector<std::size_t> top(ranked.begin(), ranked.begin() + static_cast<long>(k));
  std::vector<std::size_t> rest(ranked.begin() + static_cast<long>(k), ranked.end());
  std::sort(rest.begin(), rest.end());

  Vec3 at = walk(episode, changed, tour_rows(graph, top, episode.start), episode.start, result);
  if (result.changes_found < episode.n && !rest.empty()) {
    result.fallback_used = true;
    walk(episode, changed, tour_rows(graph, rest, at), at, result);
  }
  return result;
}

std::vector<double> variability_scores(const VsgModel& model, const SceneGraph& graph) {
  const auto prediction = model.predict(graph);
  std::vector<double> scores(graph.num_nodes());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = prediction.probabilities.row(static_cast<Eigen::Index>(i)).maxCoeff();
  }
  return scores;
}

EpisodeResult run_vsg_planner(const Episode& episode, const VsgModel& model,
                              const LabelConfig& labels) {
  if (episode.previous_map.taxonomy_name() != model.taxonomy().name()) {
    throw CheckpointError("model taxonomy '" + model.taxonomy().name() +
                          "' does not match the episode's '" +
                          episode.previous_map.taxonomy_name() + "'");
  }
  return run_vsg_planner(episode, variability_scores(model, episode.previous_map),
                         model.taxonomy(), labels);
}

double replay_distance(const Episode& episode, std::span<const ObjectId> visit_order) {
  double total = 0.0;
  double x = episode.start.x();
  double y = episode.start.y();
  double z = episode.start.z();
  for (const auto& id : visit_order) {
    const auto& p = episode.previous_map.node(id).position;
    total += std::sqrt((p.x() - x) * (p.x() - x) + (p.y() - y) * (p.y() - y) +
                       (p.z() - z) * (p.z() - z));
    x = p.x();
    y = p.y();
    z = p.z();
  }
  return total;
}

Scorer model_scorer(const VsgModel& model) {
  return [&model](const Episode& ep) { return variability_scores(model, ep.previous_map); };
}

Scorer oracle_scorer(const Taxonomy& taxonomy, const LabelConfig& labels) {
  return [&taxonomy, labels](const Episode& ep) {
    const auto changed = changed_set(ep, taxonomy, labels);
    std::vector<double> scores;
    for (const auto& n : ep.previous_map.nodes()) scores.push_back(changed.contains(n.id) ? 1 : 0);
    return scores;
  };
}

BenchmarkSummary run_benchmark(std::span<const Episode> episodes, const Taxonomy& taxonomy,
                               const Scorer& scorer, const LabelConfig& labels) {
  BenchmarkSummary summary;
  struct Acc {
    std::vector<double> coverage, vsg, speedup;
    std::size_t vsg_wins = 0, coverage_wins = 0;
  };
  std::map<std::size_t, Acc> by_n;
  Acc all;
  for (const auto& ep : episodes) {
    auto cov = run_coverage(ep, taxonomy, labels);
    auto vsg = run_vsg_planner(ep, scorer(ep), taxonomy, labels);
    if (cov.infeasible) {
      ++summary.infeasible;
    } else {
      const double speedup = cov.distance > 0 ? (cov.distance - vsg.distance) / cov.distance : 0.0;
      for (Acc* acc : {&by_n[ep.n], &all}) {
        acc->coverage.push_back(cov.distance);
        acc->vsg.push_back(vsg.distance);
        acc->speedup.push_back(speedup);
        acc->vsg_wins += vsg.distance < cov.distance ? 1 : 0;
        acc->coverage_wins += cov.distance < vsg.distance ? 1 : 0;
      }
    }
    summary.coverage_results.push_back(std::move(cov));
    summary.vsg_results.push_back(std::move(vsg));
  }
  auto reduction = [](const Acc& acc) {
    const double cov = mean_of(acc.coverage);
    return cov > 0 ? 1.0 - mean_of(acc.vsg) / cov : 0.0;
  };
  auto rows = [&](std::size_t n, const Acc& acc) {
    const double count = static_cast<double>(acc.coverage.size());
    BenchmarkRow cov{n,
                     "coverage",
                     mean_of(acc.coverage),
                     sample_std(acc.coverage),
                     static_cast<double>(acc.coverage_wins) / count,
                     0.0,
                     0.0,
                     acc.coverage.size()};
    BenchmarkRow vsg{n,
                     "vsg",
                     mean_of(acc.vsg),
                     sample_std(acc.vsg),
                     static_cast<double>(acc.vsg_wins) / count,
                     reduction(acc),
                     mean_of(acc.speedup),
                     acc.vsg.size()};
    return std::pair{cov, vsg};
  };
  for (const auto& [n, acc] : by_n) {
    auto [cov, vsg] = rows(n, acc);
    summary.rows.push_back(cov);
    summary.rows.push_back(vsg);
  }
  summary.episodes = all.coverage.size();
  if (summary.episodes > 0) {
    summary.win_fraction = static_cast<double>(all.vsg_wins) / static_cast<double>(summary.episodes);
    summary.speedup = reduction(all);
    summary.episode_speedup = mean_of(all.speedup);
  }
  return summary;
}

std::string format_benchmark_csv(const BenchmarkSummary& summary) {
  std::ostringstream out;
  out << "n,planner,mean_distance,std_distance,win_fraction,speedup\n";
  std::vector<double> cov, vsg;
  for (const auto& r : summary.rows) {
    out << r.n << ',' << r.planner << ',' << fmt(r.mean_distance) << ',' << fmt(r.std_distance)
        << ',' << fmt(r.win_fraction) << ',' << fmt(r.speedup) << '\n';
  }
  for (std::size_t i = 0; i < summary.coverage_results.size(); ++i) {
    if (summary.coverage_results[i].infeasible) continue;
    cov.push_back(summary.coverage_results[i].distance);
    vsg.push_back(summary.vsg_results[i].distance);
  }
  if (!cov.empty()) {
    std::size_t cov_wins = 0;
    for (std::size_t i = 0; i < cov.size(); ++i) cov_wins += cov[i] < vsg[i] ? 1 : 0;
    out << "all,coverage," << fmt(mean_of(cov)) << ',' << fmt(sample_std(cov)) << ','
        << fmt(static_cast<double>(cov_wins) / static_cast<double>(cov.size())) << ','
        << fmt(0.0) << '\n';
    out << "all,vsg," << fmt(mean_of(vsg)) << ',' << fmt(sample_std(vsg)) << ','
        << fmt(summary.win_fraction) << ',' << fmt(summary.speedup) << '\n';
  }
  return out.str();
}

std::vector<Episode> sample_episodes(const Dataset& dataset, Split split, std::size_t n_min,
                                     std::size_t n_max, std::size_t per_n, std::uint64_t seed,
                                     const LabelConfig& labels) {
  if (n_min == 0 || n_min > n_max) throw ConfigError("n range must satisfy 1 <= n_min <= n_max");
  std::vector<const Environment*> pool;
  for (const auto& env : dataset.environments) {
    if (env.split == split && env.scans.size() >= 2) pool.push_back(&env);
  }
  if (pool.empty()) {
    throw ConfigError("no environment with two or more scans in split '" + to_string(split) + "'");
  }
  nn::Rng rng(seed);
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  constexpr int kTries = 100;
  std::vector<Episode> out;
  for (std::size_t n = n_min; n <= n_max; ++n) {
    for (std::size_t k = 0; k < per_n; ++k) {
      std::optional<Episode> chosen;
      for (int attempt = 0; attempt < kTries; ++attempt) {
        const auto& env = *pool[pick(pool.size())];
        const auto i = pick(env.scans.size());
        auto j = pick(env.scans.size() - 1);
        if (j >= i) ++j;
        chosen = make_episode(env.scans[i], env.scans[j], n);
        if (changed_objects(*chosen, dataset.taxonomy, labels).size() >= n) break;
      }
      out.push_back(std::move(*chosen));
    }
  }
  return out;
}

}  // namespace vsg
