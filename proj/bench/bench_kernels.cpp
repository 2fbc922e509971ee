// Parallel kernels against the serial baseline on a mid-size workload.
// Run with --benchmark_min_time=... to trade precision for wall time.
#include <benchmark/benchmark.h>

#include "spikecodec/analysis.hpp"
#include "spikecodec/representation.hpp"
#include "spikecodec/serial_ref.hpp"
#include "spikecodec/spike_model.hpp"

namespace {

using namespace spikecodec;

SceneSequence bench_scene(int w, int h, int n) {
  SceneSequence seq;
  seq.width = w;
  seq.height = h;
  seq.frames.reserve(n);
  for (int t = 0; t < n; ++t) {
    SceneFrame f(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        f.at(y, x) = 0.1 + 0.8 * uniform_unit(mix64(
                               (static_cast<uint64_t>(t) << 40) ^
                               (static_cast<uint64_t>(y) << 20) ^
                               static_cast<uint64_t>(x)));
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

const SceneSequence& scene256() {
  static const SceneSequence s = bench_scene(256, 256, 64);
  return s;
}

const SpikeStream& stream256() {
  static const SpikeStream s = simulate(scene256(), SimulatorConfig{});
  return s;
}

void bm_simulate_parallel(benchmark::State& state) {
  SimulatorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(scene256(), cfg));
}
BENCHMARK(bm_simulate_parallel)->Unit(benchmark::kMillisecond);

void bm_simulate_serial(benchmark::State& state) {
  SimulatorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(ref::simulate(scene256(), cfg));
}
BENCHMARK(bm_simulate_serial)->Unit(benchmark::kMillisecond);

void bm_isi_parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(spikes_to_isi(stream256()));
}
BENCHMARK(bm_isi_parallel)->Unit(benchmark::kMillisecond);

void bm_isi_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ref::spikes_to_isi(stream256()));
}
BENCHMARK(bm_isi_serial)->Unit(benchmark::kMillisecond);

void bm_variance_parallel(benchmark::State& state) {
  const auto grid = scene_grid(scene256().frames[0]);
  for (auto _ : state)
    benchmark::DoNotOptimize(neighborhood_variance(grid, 3));
}
BENCHMARK(bm_variance_parallel)->Unit(benchmark::kMillisecond);

void bm_variance_serial(benchmark::State& state) {
  const auto grid = scene_grid(scene256().frames[0]);
  for (auto _ : state)
    benchmark::DoNotOptimize(ref::neighborhood_variance(grid, 3));
}
BENCHMARK(bm_variance_serial)->Unit(benchmark::kMillisecond);

void bm_entropy_parallel(benchmark::State& state) {
  const auto grid = isi_grid(spikes_to_isi(stream256()), 32);
  for (auto _ : state)
    benchmark::DoNotOptimize(conditional_entropy(grid, 2, 32, 32));
}
BENCHMARK(bm_entropy_parallel)->Unit(benchmark::kMillisecond);

void bm_entropy_serial(benchmark::State& state) {
  const auto grid = isi_grid(spikes_to_isi(stream256()), 32);
  for (auto _ : state)
    benchmark::DoNotOptimize(ref::conditional_entropy(grid, 2, 32, 32));
}
BENCHMARK(bm_entropy_serial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
