#include <benchmark/benchmark.h>

#include <random>

#include "vsg/embedding.hpp"
#include "vsg/nn.hpp"

namespace {

Eigen::MatrixXd binary_rows(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  vsg::nn::Rng rng(seed);
  std::bernoulli_distribution coin(0.1);
  return Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return coin(rng) ? 1.0 : 0.0; });
}

// Node vectors of the size of the real taxonomy: 527 classes plus 92 attributes.
void BM_FitPca(benchmark::State& state) {
  const auto x = binary_rows(state.range(0), 619, 5);
  for (auto _ : state) benchmark::DoNotOptimize(vsg::fit_pca(x, 120));
}
BENCHMARK(BM_FitPca)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_TransformPca(benchmark::State& state) {
  const auto x = binary_rows(2000, 619, 6);
  const auto model = vsg::fit_pca(x, 120);
  const Eigen::VectorXd v = x.row(0).transpose();
  for (auto _ : state) benchmark::DoNotOptimize(vsg::transform_pca(model, v));
}
BENCHMARK(BM_TransformPca);

}  // namespace
