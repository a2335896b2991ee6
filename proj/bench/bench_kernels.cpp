// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <map>

#include "personas/dissimilarity.hpp"
#include "personas/exact_tests.hpp"
#include "personas/parallel.hpp"
#include "personas/synthetic.hpp"
#include "personas/validation.hpp"

using namespace personas;

namespace {

const Dataset& planted(int scale) {
  static std::map<int, Dataset> cache;
  auto it = cache.find(scale);
  if (it == cache.end()) {
    PlantedConfig cfg;
    for (int& s : cfg.sizes) s *= scale;
    it = cache.emplace(scale, generate_planted(cfg).dataset).first;
  }
  return it->second;
}

void BM_distance_serial(benchmark::State& state) {
  const Dataset& d = planted(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(distance_matrix_serial(d));
  state.counters["n"] = static_cast<double>(d.size());
}

void BM_distance_parallel(benchmark::State& state) {
  const Dataset& d = planted(static_cast<int>(state.range(0)));
  set_thread_count(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(distance_matrix(d));
  state.counters["n"] = static_cast<double>(d.size());
}

// A spread of outcomes of a 30 x 30 table.
std::vector<std::pair<int, int>> all_outcomes(int n1, int n2, int step) {
  std::vector<std::pair<int, int>> xs;
  for (int a = 0; a <= n1; a += step)
    for (int b = 0; b <= n2; b += step) xs.emplace_back(a, b);
  return xs;
}

void BM_boschloo_serial(benchmark::State& state) {
  const auto xs = all_outcomes(30, 30, 6);
  BoschlooOptions opts;
  opts.refine = false;
  for (auto _ : state)
    for (auto [a, b] : xs) benchmark::DoNotOptimize(boschloo_serial({a, 30, b, 30}, opts));
  state.counters["tables"] = static_cast<double>(xs.size());
}

void BM_boschloo_battery(benchmark::State& state) {
  const auto xs = all_outcomes(30, 30, 6);
  BoschlooOptions opts;
  opts.refine = false;
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(BoschlooBattery(30, 30, opts).run(xs));
  state.counters["tables"] = static_cast<double>(xs.size());
}

SensitivityConfig sensitivity_config() {
  SensitivityConfig sc;
  sc.samples = 50;
  for (int v = 1; v <= 15; ++v) sc.levels.push_back(v);
  return sc;
}

void BM_sensitivity_serial(benchmark::State& state) {
  const DistanceMatrix dm = distance_matrix(planted(1));
  for (auto _ : state) benchmark::DoNotOptimize(sensitivity_analysis_serial(dm, sensitivity_config()));
}

void BM_sensitivity_parallel(benchmark::State& state) {
  const DistanceMatrix dm = distance_matrix(planted(1));
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sensitivity_analysis(dm, sensitivity_config()));
}

}  // namespace

BENCHMARK(BM_distance_serial)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_distance_parallel)->ArgsProduct({{1, 4}, {1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_boschloo_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_boschloo_battery)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sensitivity_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sensitivity_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
