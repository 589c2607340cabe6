// Serial reference loops against the OpenMP kernels.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "ih/analytics.hpp"
#include "ih/evaluation.hpp"
#include "ih/risk.hpp"

namespace {

std::vector<ih::GroundPoint> crowd(std::size_t n, double extent) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0.0, extent);
  std::vector<ih::GroundPoint> p(n);
  for (auto& q : p) q = {u(rng), u(rng)};
  return p;
}

const ih::WalkingArea& plaza() {
  static const ih::WalkingArea area({{0, 0}, {40, 0}, {40, 30}, {0, 30}});
  return area;
}

void BM_RisksReference(benchmark::State& state) {
  const auto pos = crowd(static_cast<std::size_t>(state.range(0)), 30);
  const ih::RiskParams p;
  for (auto _ : state) benchmark::DoNotOptimize(ih::reference::individual_risks(p, pos));
  state.SetItemsProcessed(state.iterations());
}

void BM_RisksKernel(benchmark::State& state) {
  const auto pos = crowd(static_cast<std::size_t>(state.range(0)), 30);
  const ih::RiskParams p;
  for (auto _ : state) benchmark::DoNotOptimize(ih::kernels::individual_risks(p, pos));
  state.SetItemsProcessed(state.iterations());
}

void BM_MapReference(benchmark::State& state) {
  const auto pos = crowd(static_cast<std::size_t>(state.range(0)), 30);
  const ih::RiskParams p;
  for (auto _ : state) benchmark::DoNotOptimize(ih::reference::dynamic_risk_map(p, pos, plaza(), 0.25));
}

void BM_MapKernel(benchmark::State& state) {
  const auto pos = crowd(static_cast<std::size_t>(state.range(0)), 30);
  const ih::RiskParams p;
  for (auto _ : state) benchmark::DoNotOptimize(ih::kernels::dynamic_risk_map(p, pos, plaza(), 0.25));
}

std::vector<ih::EvalFrame> eval_frames(const ih::PlaneFrame& frame) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x(-10, 10), y(0, 60);
  std::normal_distribution<double> noise(0.0, 0.4);
  std::vector<ih::EvalFrame> frames(2000);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    frames[f].frame_id = static_cast<std::int64_t>(f);
    for (int k = 0; k < 20; ++k) {
      const Eigen::Vector3d foot(x(rng), y(rng), 0.0);
      frames[f].gt_feet_3d.push_back(foot);
      const auto g = frame.to_plane(foot);
      frames[f].predicted_ground.push_back({g.x + noise(rng), g.y + noise(rng)});
    }
  }
  return frames;
}

template <bool Parallel>
void BM_Metrics(benchmark::State& state) {
  ih::CameraModel cam;
  cam.translation = {0, 0, 8};
  const std::map<std::string, ih::SequenceGeometry> geo{
      {"0", {ih::PlaneFrame::make(ih::Plane{Eigen::Vector3d::UnitZ(), 0.0}), cam}}};
  const auto frames = eval_frames(geo.at("0").frame);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(ih::compute_metrics(frames, geo, ih::kDefaultThresholds, ih::kDefaultRanges, 1));
    } else {
      benchmark::DoNotOptimize(
          ih::reference::compute_metrics(frames, geo, ih::kDefaultThresholds, ih::kDefaultRanges, 1));
    }
  }
}

}  // namespace

BENCHMARK(BM_RisksReference)->Arg(60)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_RisksKernel)->Arg(60)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_MapReference)->Arg(60)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MapKernel)->Arg(60)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Metrics<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Metrics<true>)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
