#include <benchmark/benchmark.h>

#include <random>

#include "tnmf/cluster_eval.hpp"
#include "tnmf/graph_laplacian.hpp"
#include "tnmf/nmf.hpp"

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

void BM_PairwiseDistances(benchmark::State& state) {
  const auto x = random_matrix(500, state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(tnmf::pairwise_distances(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PairwiseDistances)->Arg(100)->Arg(400)->Arg(1000)->Complexity();

void BM_CutoffPL(benchmark::State& state) {
  const auto d = tnmf::pairwise_distances(random_matrix(50, state.range(0), 2));
  const auto z = tnmf::FiltrationWeights::ones(8);
  for (auto _ : state) benchmark::DoNotOptimize(tnmf::cutoff_persistent_laplacian(d, z));
}
BENCHMARK(BM_CutoffPL)->Arg(200)->Arg(800);

void BM_KnnPL(benchmark::State& state) {
  const auto d = tnmf::pairwise_distances(random_matrix(50, state.range(0), 3));
  const auto z = tnmf::FiltrationWeights::ones(8);
  for (auto _ : state) benchmark::DoNotOptimize(tnmf::knn_persistent_laplacian(d, z));
}
BENCHMARK(BM_KnnPL)->Arg(200)->Arg(800);

// Fifty iterations of one variant on a 500 x 300 matrix at rank 10.
void BM_Factorize(benchmark::State& state) {
  const auto v = static_cast<tnmf::Variant>(state.range(0));
  const auto x = random_matrix(500, 300, 4);
  tnmf::MethodConfig cfg;
  cfg.variant = v;
  cfg.rank = 10;
  cfg.max_iters = 50;
  cfg.rel_tol = 0.0;
  if (tnmf::is_regularized(v)) {
    const auto d = tnmf::pairwise_distances(x);
    cfg.graph = std::make_shared<const tnmf::GraphRegularizer>(
        tnmf::knn_persistent_laplacian(d, tnmf::FiltrationWeights::ones(8)));
  }
  const auto init = tnmf::nndsvda_init(x, cfg.rank);
  for (auto _ : state) benchmark::DoNotOptimize(tnmf::factorize(x, cfg, init));
  state.SetLabel(std::string(tnmf::to_string(v)));
}
BENCHMARK(BM_Factorize)
    ->Arg(static_cast<int>(tnmf::Variant::NMF))
    ->Arg(static_cast<int>(tnmf::Variant::rNMF))
    ->Arg(static_cast<int>(tnmf::Variant::kTNMF))
    ->Arg(static_cast<int>(tnmf::Variant::krTNMF))
    ->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const auto h = random_matrix(10, state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(tnmf::kmeans(h, 8, 0));
}
BENCHMARK(BM_KMeans)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
