#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "dum/baselines.hpp"
#include "dum/gaussian.hpp"
#include "dum/loss.hpp"
#include "dum/matrix.hpp"
#include "dum/rng.hpp"
#include "dum/scoring.hpp"
#include "dum/variance_net.hpp"

namespace {

dum::Matrix random_matrix(std::size_t rows, std::size_t cols,
                          std::uint64_t seed) {
  dum::Rng rng(seed);
  dum::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = rng.uniform();
  }
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const dum::Matrix a = random_matrix(n, n, 1);
  const dum::Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dum::matmul(a, b));
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128)->Arg(256);

void BM_PoECombine(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  dum::Rng rng(3);
  std::vector<dum::DiagGaussian> experts;
  for (std::size_t i = 0; i < m; ++i) {
    dum::Vec mean(64), var(64);
    for (auto& v : mean) v = rng.normal();
    for (auto& v : var) v = 0.5 + rng.uniform();
    experts.push_back({std::move(mean), std::move(var)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(dum::poe_combine(experts));
  }
}
BENCHMARK(BM_PoECombine)->Arg(1)->Arg(2)->Arg(8);

void BM_NetForward(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const dum::Matrix data = random_matrix(rows, 32, 4);
  dum::VarianceNet net(32, 64);
  net.init(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(data));
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_NetForward)->Arg(64)->Arg(512);

void BM_LossStep(benchmark::State& state) {
  const std::size_t groups = 32, m = 2, dim = 16;
  const dum::Matrix data = random_matrix(groups * 2 * m, dim, 6);
  dum::VarianceNet net(dim, 64);
  net.init(7);
  dum::GroupBatch batch{data, m, groups};
  dum::LossConfig cfg;
  for (auto _ : state) {
    net.zero_grads();
    benchmark::DoNotOptimize(dum::dum_loss(batch, net, cfg));
  }
  state.SetItemsProcessed(state.iterations() * groups);
}
BENCHMARK(BM_LossStep);

void BM_Score(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const dum::Matrix data = random_matrix(rows, 32, 8);
  dum::VarianceNet net(32, 64);
  net.init(9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dum::score(net, data));
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_Score)->Arg(256)->Arg(2048);

void BM_Knn(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const dum::Matrix data = random_matrix(rows, 16, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dum::knn_score(data, 5));
  }
}
BENCHMARK(BM_Knn)->Arg(256)->Arg(1024);

void BM_IsolationForest(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const dum::Matrix data = random_matrix(rows, 16, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dum::iforest_score(data, {}));
  }
}
BENCHMARK(BM_IsolationForest)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
