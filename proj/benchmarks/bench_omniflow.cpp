#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "omniflow/dataset_stats.hpp"
#include "omniflow/distortion.hpp"
#include "omniflow/equirect_warp.hpp"
#include "omniflow/metrics.hpp"
#include "omniflow/siamese.hpp"

using namespace omniflow;

namespace {

Image noise_image(int w, int h, int channels) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<float> d(0.0f, 255.0f);
  Image img(w, h, channels);
  for (float& v : img.samples()) v = d(gen);
  return img;
}

FlowField noise_flow(int w, int h, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<float> d(-20.0f, 20.0f);
  FlowField f(w, h);
  for (float& v : f.u_plane()) v = d(gen);
  for (float& v : f.v_plane()) v = d(gen);
  return f;
}

const Rotation3 kRotation = rotation_from_euler(0.3, -0.7, 1.9);

}  // namespace

static void BM_BuildWarpMap(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_warp_map(kRotation, 2 * h, h));
  state.SetItemsProcessed(state.iterations() * 2 * h * h);
}
BENCHMARK(BM_BuildWarpMap)->Arg(256)->Arg(512);

static void BM_WarpImage(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  const Image img = noise_image(2 * h, h, 3);
  const WarpMap m = build_warp_map(kRotation, 2 * h, h);
  Image out(2 * h, h, 3);
  const Interp interp = state.range(1) ? Interp::bilinear : Interp::nearest;
  for (auto _ : state) {
    warp_image_into(img.view(), m, interp, out.view());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * 2 * h * h);
}
BENCHMARK(BM_WarpImage)->Args({512, 0})->Args({512, 1});

static void BM_WarpFlow(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  const FlowField f = noise_flow(2 * h, h, 2);
  const WarpMap m = build_warp_map(kRotation, 2 * h, h);
  for (auto _ : state) benchmark::DoNotOptimize(warp_flow(f, m, kRotation));
  state.SetItemsProcessed(state.iterations() * 2 * h * h);
}
BENCHMARK(BM_WarpFlow)->Arg(256)->Arg(512);

static void BM_MetricAccumulator(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  const FlowField p = noise_flow(2 * h, h, 3), g = noise_flow(2 * h, h, 4);
  const DensityMap d = build_density_map(2 * h, h, 64);
  for (auto _ : state) {
    MetricAccumulator acc;
    acc.add(p, g, &d);
    benchmark::DoNotOptimize(acc.report());
  }
  state.SetItemsProcessed(state.iterations() * 2 * h * h);
}
BENCHMARK(BM_MetricAccumulator)->Arg(256)->Arg(512);

static void BM_DensityMap(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_density_map(2 * h, h));
}
BENCHMARK(BM_DensityMap)->Arg(256)->Arg(512);

static void BM_PowerSpectrum(benchmark::State& state) {
  const Image frame = noise_image(1024, 512, 1);
  for (auto _ : state) {
    SpectrumAccumulator acc(512);
    acc.add(frame);
    benchmark::DoNotOptimize(acc.result());
  }
}
BENCHMARK(BM_PowerSpectrum);

static void BM_DerivativeStats(benchmark::State& state) {
  const Image frame = noise_image(1024, 512, 1);
  for (auto _ : state) {
    DerivativeStats s = make_frame_derivative_stats();
    accumulate_spatial_derivatives(frame, DerivativeAxis::spatial_x, s);
    benchmark::DoNotOptimize(s.kurtosis());
  }
}
BENCHMARK(BM_DerivativeStats);

static void BM_SampleAugmentations(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sample_augmentations(Strategy::v2, 7, 10000));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SampleAugmentations);

BENCHMARK_MAIN();
