#include <benchmark/benchmark.h>

#include "invrig/ordering.hpp"
#include "invrig/solvers.hpp"
#include "invrig/synthetic.hpp"

namespace {

using namespace invrig;

struct Scene {
  BlendshapeRig rig;
  Animation noisy;
};

// One noisy sequence on the default rig at desk scale (n = 1000).
const Scene& scene() {
  static const Scene s = [] {
    SyntheticRigSpec spec;
    spec.vertices = 1000;
    auto rig = generate_rig(spec);
    SequenceSpec seq;
    seq.frames = 32;
    auto noisy = add_noise(generate_sequence(rig, seq).clean, 0.03, 3);
    return Scene{std::move(rig), std::move(noisy)};
  }();
  return s;
}

void run_frames(benchmark::State& state, const SolverConfig& config) {
  const auto& s = scene();
  const FrameSolver solver(s.rig, config);
  const auto frames = s.noisy.meshes();
  std::size_t t = 0;
  for (auto _ : state) {
    auto report = solver.solve(frames[t++ % frames.size()]);
    benchmark::DoNotOptimize(report.weights.data());
  }
}

void BM_Method(benchmark::State& state) {
  SolverConfig config;
  config.method = kAllMethods[state.range(0)];
  config.alpha = config.method == Method::Joshi || config.method == Method::Seol ? 0.0 : 0.5;
  config.passes = 5;
  run_frames(state, config);
  state.SetLabel(std::string(to_string(config.method)));
}
BENCHMARK(BM_Method)->DenseRange(0, std::size(kAllMethods) - 1)->Unit(benchmark::kMillisecond);

void BM_Ordering(benchmark::State& state) {
  SolverConfig config;
  config.method = Method::CdQuartic;
  config.alpha = 0.5;
  config.passes = 5;
  config.ordering = {kAllOrderings[state.range(0)], 7};
  run_frames(state, config);
  state.SetLabel(std::string(to_string(config.ordering.kind)));
}
BENCHMARK(BM_Ordering)->DenseRange(0, std::size(kAllOrderings) - 1)->Unit(benchmark::kMillisecond);

void BM_EvaluateQuartic(benchmark::State& state) {
  const auto& s = scene();
  WeightVector w = WeightVector::Constant(s.rig.blendshape_count(), 0.3);
  for (auto _ : state) {
    auto mesh = evaluate_quartic(s.rig, w);
    benchmark::DoNotOptimize(mesh.coords().data());
  }
}
BENCHMARK(BM_EvaluateQuartic)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
