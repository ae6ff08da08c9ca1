#include <benchmark/benchmark.h>

#include <random>

#include "lanewrap/aggregation.hpp"
#include "lanewrap/centerlines.hpp"
#include "lanewrap/frenet_scene.hpp"
#include "lanewrap/geometry.hpp"
#include "lanewrap/lane_scorer.hpp"
#include "lanewrap/predictors.hpp"
#include "lanewrap/synthgen.hpp"

namespace {

using namespace lanewrap;

ParamPolyline arc(double radius, double length, double spacing) {
  std::vector<Vec2> v;
  const int n = static_cast<int>(length / spacing);
  for (int i = 0; i <= n; ++i) {
    const double a = spacing * i / radius;
    v.push_back({radius * std::sin(a), radius * (1.0 - std::cos(a))});
  }
  return build_polyline(v);
}

void BM_Project(benchmark::State& state) {
  const auto pl = arc(50.0, static_cast<double>(state.range(0)), 1.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec2> pts;
  for (int i = 0; i < 256; ++i) pts.push_back(to_cartesian(pl, {pl.length() * u(rng), 4.0 * u(rng) - 2.0}).position);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pl.project(pts[i++ & 255]));
  }
}
BENCHMARK(BM_Project)->Arg(60)->Arg(120)->Arg(480);

void BM_ToCartesian(benchmark::State& state) {
  const auto pl = arc(50.0, 120.0, 1.0);
  double s = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(to_cartesian(pl, {s, 1.0}));
    s = s > 110.0 ? 0.0 : s + 0.7;
  }
}
BENCHMARK(BM_ToCartesian);

void BM_SceneToFrenet(benchmark::State& state) {
  const auto g = generate(Topology::kFork, 3);
  const auto seqs = enumerate_sequences(g.scene);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scene_to_frenet(g.scene, seqs.front()));
  }
}
BENCHMARK(BM_SceneToFrenet);

void BM_EnumerateSequences(benchmark::State& state) {
  const auto g = generate(Topology::kFork, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_sequences(g.scene));
  }
}
BENCHMARK(BM_EnumerateSequences);

void BM_WrapFrenetCa(benchmark::State& state) {
  const auto g = generate(Topology::kFork, 3);
  ConstantAccelerationPredictor ca;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wrap_frenet(g.scene, ca, kCaModes));
  }
}
BENCHMARK(BM_WrapFrenetCa);

void BM_GreedyAggregate(benchmark::State& state) {
  const auto g = generate(Topology::kFork, 3);
  ConstantAccelerationPredictor ca;
  const auto cands = wrap_frenet(g.scene, ca, kCaModes);
  AggregationConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(aggregate(g.scene, cands, cfg));
  }
}
BENCHMARK(BM_GreedyAggregate);

void BM_ScorerForward(benchmark::State& state) {
  const auto g = generate(Topology::kFork, 3);
  const auto seqs = enumerate_sequences(g.scene);
  const auto params = ScorerParams::initialize(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_centerlines(params, g.scene, seqs));
  }
}
BENCHMARK(BM_ScorerForward);

}  // namespace

BENCHMARK_MAIN();
