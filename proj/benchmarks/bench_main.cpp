#include <benchmark/benchmark.h>

#include <random>

#include "scn/cover.hpp"
#include "scn/orbit_metric.hpp"
#include "scn/transforms.hpp"

namespace {

scn::Sample random_sample(std::size_t n, std::uint64_t seed) {
  const auto shape = scn::make_shape(32, 32, 3);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0F, 1.0F);
  std::vector<scn::DataPoint> points;
  std::vector<scn::Label> labels;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<float> v(shape.elements());
    for (auto& x : v) x = u(rng);
    points.emplace_back(shape, std::move(v));
    labels.push_back(static_cast<scn::Label>(i % 10));
  }
  return scn::Sample(std::move(points), std::move(labels));
}

scn::DistanceMatrix random_metric(std::size_t n) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  scn::DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.set_symmetric(i, j, u(rng));
  return d;
}

void BM_OrbitDistances(benchmark::State& state, const char* preset) {
  const auto sample = random_sample(static_cast<std::size_t>(state.range(0)), 1);
  const auto spec = scn::preset(preset);
  for (auto _ : state) benchmark::DoNotOptimize(scn::direct_orbit_distances(sample, spec, 0));
}
BENCHMARK_CAPTURE(BM_OrbitDistances, flip, "flip")->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OrbitDistances, crop, "crop")->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ShortestPaths(benchmark::State& state) {
  const auto d = random_metric(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(scn::shortest_path_metric(d));
}
BENCHMARK(BM_ShortestPaths)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_KMedoidsCover(benchmark::State& state) {
  const auto rho = scn::shortest_path_metric(random_metric(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(scn::scn_kmedoids(rho, 3.0, 0));
}
BENCHMARK(BM_KMedoidsCover)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_GreedyCover(benchmark::State& state) {
  const auto rho = scn::shortest_path_metric(random_metric(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(scn::scn_greedy(rho, 3.0));
}
BENCHMARK(BM_GreedyCover)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
