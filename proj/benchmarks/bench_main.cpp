#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "rffs/pipeline.hpp"
#include "rffs/raster_features.hpp"
#include "rffs/spatial_index.hpp"
#include "rffs/synth.hpp"

namespace {

using namespace rffs;

PointCloud uniform_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  PointCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({u(rng), u(rng), 0.1 * u(rng), 100.0});
  return c;
}

void BM_KdTreeBuild(benchmark::State& state) {
  const PointCloud cloud = uniform_cloud(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_kdtree(cloud, 0.5, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->Arg(10000)->Arg(60000)->Arg(1000000);

void BM_KdTreeKNearest(benchmark::State& state) {
  const PointCloud cloud = uniform_cloud(60000, 2);
  const KdTree tree = build_kdtree(cloud, 1.0, 0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tree.k_nearest({u(rng), u(rng)}, k));
}
BENCHMARK(BM_KdTreeKNearest)->Arg(1)->Arg(16)->Arg(128);

void BM_TileLocate(benchmark::State& state) {
  std::vector<TileRecord> tiles;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      tiles.push_back({"t" + std::to_string(i * 100 + j), BBox::make(j * 200.0, i * 200.0, j * 200.0 + 200.0, i * 200.0 + 200.0), ""});
    }
  }
  const TileIndex index = build_tile_index(tiles);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 20000.0);
  for (auto _ : state) benchmark::DoNotOptimize(&locate_tile(index, {u(rng), u(rng)}));
}
BENCHMARK(BM_TileLocate);

void BM_StructuralStats(benchmark::State& state) {
  const PointCloud cloud = uniform_cloud(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(structural_stats(cloud.points));
}
BENCHMARK(BM_StructuralStats)->Arg(16)->Arg(32)->Arg(128);

void BM_ExtractSegment(benchmark::State& state) {
  const Scene scene = synth_scene(SceneKind::Urban, 6);
  const ExtractOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(extract_segment(scene.cloud, scene.label, opts));
}
BENCHMARK(BM_ExtractSegment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
