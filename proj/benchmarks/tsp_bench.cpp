#include <benchmark/benchmark.h>

#include <random>

#include "vsg/planner.hpp"

namespace {

std::vector<vsg::Vec3> random_points(std::size_t n, std::uint64_t seed) {
  vsg::nn::Rng rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  std::vector<vsg::Vec3> p;
  for (std::size_t i = 0; i < n; ++i) p.emplace_back(coord(rng), coord(rng), 0.0);
  return p;
}

void BM_HeldKarp(benchmark::State& state) {
  const auto points = random_points(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(vsg::solve_tsp_exact(points, vsg::Vec3::Zero()));
}
BENCHMARK(BM_HeldKarp)->DenseRange(6, 14, 4)->Unit(benchmark::kMillisecond);

void BM_Heuristic(benchmark::State& state) {
  const auto points = random_points(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vsg::solve_tsp_heuristic(points, vsg::Vec3::Zero()));
  }
}
BENCHMARK(BM_Heuristic)->Arg(10)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace
