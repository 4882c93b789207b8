#include <benchmark/benchmark.h>

#include <affrec/recovery.hpp>
#include <affrec/robust.hpp>
#include <affrec/synthbench.hpp>

using namespace affrec;

namespace {

const SyntheticScene& bench_scene() {
  static const SyntheticScene scene = generate_scene(1234, 0.2);
  return scene;
}

void BM_RecoverAffine(benchmark::State& state) {
  const SyntheticScene& scene = bench_scene();
  std::size_t i = 0;
  for (auto _ : state) {
    const RecoveryResult r = recover_affine(scene.gt_f, scene.sift[i % scene.sift.size()]);
    benchmark::DoNotOptimize(r.candidates.data());
    ++i;
  }
}
BENCHMARK(BM_RecoverAffine);

void BM_SolveQuadratic(benchmark::State& state) {
  double a = 1.0, b = -3.0, c = 2.0;
  for (auto _ : state) {
    const QuadraticRoots r = solve_quadratic(a, b, c);
    benchmark::DoNotOptimize(r.count);
  }
}
BENCHMARK(BM_SolveQuadratic);

void BM_HafFromAc(benchmark::State& state) {
  const SyntheticScene& scene = bench_scene();
  std::size_t i = 0;
  for (auto _ : state) {
    const Homography h = haf_from_ac(scene.gt_f, scene.points[i % scene.points.size()]);
    benchmark::DoNotOptimize(h.matrix().data());
    ++i;
  }
}
BENCHMARK(BM_HafFromAc);

void BM_FourPointDlt(benchmark::State& state) {
  const SyntheticScene& scene = bench_scene();
  std::vector<PointPair> pairs;
  for (int i = 0; i < 4; ++i) {
    pairs.push_back({scene.points[static_cast<std::size_t>(i)].p1,
                     scene.points[static_cast<std::size_t>(i)].p2});
  }
  for (auto _ : state) {
    const Homography h = h_4pt(pairs);
    benchmark::DoNotOptimize(h.matrix().data());
  }
}
BENCHMARK(BM_FourPointDlt);

void BM_LoRansac(benchmark::State& state) {
  const SyntheticScene& scene = bench_scene();
  const LabeledMatches data = make_labeled_matches(scene, 100, 100, 5);
  const SolverCombo combo =
      state.range(0) == 0 ? SolverCombo::parse("1S4P") : SolverCombo::parse("4P4P");
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RansacConfig cfg;
    cfg.combo = combo;
    cfg.confidence = 0.99;
    cfg.seed = seed++;
    const RansacResult r = lo_ransac_homography(data.matches, &scene.gt_f, cfg, data.qualities);
    benchmark::DoNotOptimize(r.samples_drawn);
  }
}
BENCHMARK(BM_LoRansac)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
