#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "overlay/builder.hpp"
#include "overlay/metrics.hpp"

using namespace overlay;

namespace {

constexpr int kM = 4;

struct Fixture {
  DelaySpace space;
  CapacityProfile caps;
  Topology topology;
};

const Fixture& fixture(std::size_t n) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    auto space = generate(DistributionSpec::standard(Distribution::LooseCluster, n, 5));
    auto caps = CapacityProfile::random(n, 16, std::vector<int>{1, 5, 10, 16}, 6);
    auto topo = build(space, caps, PolicySpec::parse("GDD"), kM, 7);
    it = cache.emplace(n, Fixture{std::move(space), std::move(caps), std::move(topo)}).first;
  }
  return it->second;
}

void BM_Build(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  const auto policy = PolicySpec::parse("FDD");
  for (auto _ : state) benchmark::DoNotOptimize(build(f.space, f.caps, policy, kM, 9));
}

void BM_BuildReference(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  const auto policy = PolicySpec::parse("FDD");
  for (auto _ : state) benchmark::DoNotOptimize(reference::build(f.space, f.caps, policy, kM, 9));
}

void BM_SystemVulnerability(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  const PathTable paths(f.topology, f.space);
  for (auto _ : state) benchmark::DoNotOptimize(system_vulnerability(paths, kM));
}

void BM_SystemVulnerabilityReference(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  const PathTable paths(f.topology, f.space);
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::system_vulnerability(paths, kM));
}

void BM_TreeDelay(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tree_delay(f.topology, f.space, kM));
}

void BM_Verify(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_feasible(f.topology, f.caps.u, kM));
}

void BM_VerifyReference(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::verify_feasible(f.topology, f.caps.u, kM));
}

}  // namespace

BENCHMARK(BM_Build)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildReference)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SystemVulnerability)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SystemVulnerabilityReference)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TreeDelay)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Verify)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyReference)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
