#include <benchmark/benchmark.h>

#include "recomb/canonical.hpp"
#include "recomb/induced.hpp"
#include "recomb/lattice_dp.hpp"
#include "recomb/mckean.hpp"
#include "recomb/ode.hpp"
#include "recomb/particles.hpp"
#include "recomb/transport.hpp"

using namespace recomb;

namespace {

Distribution random_law(const SpaceShape& shape, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(shape.size());
  for (double& x : w) x = rng.exponential(1.0);
  return Distribution::from_weights(shape, std::move(w));
}

void BM_Evolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Distribution p0 = random_law(SpaceShape::binary(n), 1);
  const auto nu = RecombinationMeasure::uniform_crossover(n);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_to(p0, nu, 1.0, 0.01));
  state.counters["states"] = static_cast<double>(p0.size());
}
BENCHMARK(BM_Evolve)->DenseRange(2, 10, 2)->Unit(benchmark::kMillisecond);

void BM_LatticeDP(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const InducedMeasure mu = induce(random_law(SpaceShape::binary(2), 2));
  for (auto _ : state) benchmark::DoNotOptimize(LatticeDP(mu, N).slice_sum(N));
}
BENCHMARK(BM_LatticeDP)->RangeMultiplier(2)->Range(20, 640)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Distribution p = random_law(SpaceShape::binary(3), 3);
  const CanonicalSampler sampler(p, rho_pi(p.site_marginals(), N));
  const auto nu = RecombinationMeasure::uniform_crossover(3);
  Rng rng(4);
  const ParticleState eta0 = sampler(rng);
  std::size_t events = 0;
  for (auto _ : state) events += simulate(eta0, nu, 10.0, rng).event_count;
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulate)->RangeMultiplier(4)->Range(100, 6400)->Unit(benchmark::kMillisecond);

void BM_Wasserstein(benchmark::State& state) {
  const SpaceShape shape = SpaceShape::binary(static_cast<int>(state.range(0)));
  const Distribution p = random_law(shape, 5);
  const Distribution q = random_law(shape, 6);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein(p, q));
}
BENCHMARK(BM_Wasserstein)->DenseRange(2, 5)->Unit(benchmark::kMicrosecond);

void BM_SampleTree(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0)) / 2;
  Rng rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(sample_tree(t, rng).leaf_count());
}
BENCHMARK(BM_SampleTree)->DenseRange(1, 4);

}  // namespace

BENCHMARK_MAIN();
