#include "nnlci/mlp.hpp"
#include "nnlci/presets.hpp"
#include "nnlci/reference.hpp"
#include "nnlci/schemes.hpp"
#include "nnlci/stencils.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace nnlci;

namespace {

GridSpec config1_grid(int cells) {
  GridSpec g = builtin_preset("config1").grid(cells);
  g.dt = 0.2 / cells;
  return g;
}

void BM_LeapfrogStep2D(benchmark::State& st) {
  const EulerLaw law;
  const GridSpec g = config1_grid(static_cast<int>(st.range(0)));
  const StateArray u = to_conserved(initial_nodes(builtin_preset("config1"), g), law);
  SchemeConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(leapfrog_diffusion_step(law, g, u, u, cfg));
  st.SetItemsProcessed(st.iterations() * g.nodes_x() * g.nodes_y());
}
BENCHMARK(BM_LeapfrogStep2D)->Arg(100)->Arg(200);

void BM_ReferenceRhs2D(benchmark::State& st) {
  const EulerLaw law;
  const ICPreset p = builtin_preset("config1");
  const GridSpec g = p.grid(static_cast<int>(st.range(0)));
  StateArray u = initial_cells(p, g, {});
  for (auto _ : st) benchmark::DoNotOptimize(reference_rhs(law, g, u));
  st.SetItemsProcessed(st.iterations() * g.nx * g.ny);
}
BENCHMARK(BM_ReferenceRhs2D)->Arg(100)->Arg(200);

void BM_LossAndGrad(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<StencilSample> samples(static_cast<std::size_t>(n));
  for (auto& s : samples) {
    s.input.resize(80);
    s.target.resize(4);
    for (double& v : s.input) v = d(rng);
    for (double& v : s.target) v = d(rng);
  }
  MlpModel m({80, 128, 128, 128, 128, 128, 128, 4});
  m.init_glorot(1);
  m.norm = fit_norm_stats(samples);
  const NormalizedBatch b = normalize_batch(m, samples);
  std::vector<double> g(m.num_params());
  for (auto _ : st) benchmark::DoNotOptimize(loss_and_grad(m, b, g));
  st.SetItemsProcessed(st.iterations() * n);
}
BENCHMARK(BM_LossAndGrad)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
