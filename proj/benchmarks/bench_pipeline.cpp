#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "deepagg/aggregation.hpp"
#include "deepagg/retrieval.hpp"
#include "deepagg/whitening.hpp"

namespace {

using namespace deepagg;

FeatureTensor pool5_like(std::mt19937_64& rng, std::size_t k, std::size_t h, std::size_t w) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(k * h * w);
  for (auto& x : v) x = u(rng) < 0.6f ? 0.0f : 4.0f * u(rng);
  return FeatureTensor(k, h, w, std::move(v));
}

std::vector<GlobalDescriptor> unit_set(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g;
  std::vector<GlobalDescriptor> out;
  out.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> v(d);
    for (auto& x : v) x = g(rng);
    out.push_back(GlobalDescriptor::normalized(std::move(v), "d" + std::to_string(r)));
  }
  return out;
}

void BM_AggregateRaw(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto t = pool5_like(rng, 512, side, side);
  const AggregationConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_raw(t, cfg));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AggregateRaw)->Arg(7)->Arg(16)->Arg(32);

void BM_Search(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto db = unit_set(rng, static_cast<std::size_t>(state.range(0)), 512);
  const auto index = build_index(db);
  const auto q = unit_set(rng, 1, 512)[0];
  for (auto _ : state) benchmark::DoNotOptimize(search(index, q));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Search)->Arg(1000)->Arg(5000);

void BM_FitWhitening(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto train = unit_set(rng, 2000, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_whitening(train, {}));
}
BENCHMARK(BM_FitWhitening)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
