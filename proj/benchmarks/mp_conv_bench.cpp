#include <benchmark/benchmark.h>

#include <random>

#include "vsg/model.hpp"

namespace {

using vsg::Edge;
using vsg::nn::Matrix;

struct Graph {
  Matrix z;
  std::vector<Edge> edges;
  Matrix q;
};

Graph random_graph(std::size_t nodes, std::size_t d, std::size_t edge_dim, double density,
                   vsg::nn::Rng& rng) {
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(density);
  Graph g;
  g.z = Matrix::NullaryExpr(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(d),
                            [&] { return normal(rng); });
  for (std::size_t s = 0; s < nodes; ++s) {
    for (std::size_t t = 0; t < nodes; ++t) {
      if (s != t && coin(rng)) g.edges.push_back({s, t});
    }
  }
  g.q = Matrix::NullaryExpr(static_cast<Eigen::Index>(g.edges.size()),
                            static_cast<Eigen::Index>(edge_dim), [&] { return normal(rng); });
  return g;
}

void BM_MpConvForward(benchmark::State& state) {
  vsg::nn::Rng rng(1);
  const auto nodes = static_cast<std::size_t>(state.range(0));
  vsg::MpConv conv("c", 120, 44, 64, vsg::GateMode::kElementwise, &rng);
  const auto g = random_graph(nodes, 120, 44, 0.1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(g.z, g.edges, g.q));
  state.counters["edges"] = static_cast<double>(g.edges.size());
}
BENCHMARK(BM_MpConvForward)->Arg(16)->Arg(64)->Arg(256);

void BM_MpConvForwardBackward(benchmark::State& state) {
  vsg::nn::Rng rng(2);
  const auto nodes = static_cast<std::size_t>(state.range(0));
  vsg::MpConv conv("c", 120, 44, 64, vsg::GateMode::kElementwise, &rng);
  const auto g = random_graph(nodes, 120, 44, 0.1, rng);
  const Matrix upstream = Matrix::Ones(g.z.rows(), g.z.cols());
  for (auto _ : state) {
    vsg::MpConv::Cache cache;
    conv.forward(g.z, g.edges, g.q, &cache);
    benchmark::DoNotOptimize(conv.backward(cache, upstream));
  }
}
BENCHMARK(BM_MpConvForwardBackward)->Arg(16)->Arg(64)->Arg(256);

}  // namespace
