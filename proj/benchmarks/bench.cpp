// Microbenchmarks for the hot paths: single integrator steps, one-period
// monodromy assembly, spectrum classification, and the projector reduction.

#include <floqlat/experiments.hpp>

#include <benchmark/benchmark.h>

#include <numbers>

using namespace floqlat;

namespace {

LatticeConfig driven_chain(int n, double omega_over_delta) {
  LatticeConfig cfg;
  cfg.n_sites = n;
  cfg.kappa0 = 0.03;
  cfg.dkappa1 = 0.02;
  cfg.period = 2.0 * std::numbers::pi / (omega_over_delta * bandwidth(cfg));
  return cfg;
}

void BM_StepUnitary(benchmark::State& state) {
  const LatticeConfig cfg = driven_chain(static_cast<int>(state.range(0)), 0.7);
  const Eigen::MatrixXd h = build_hamiltonian(cfg, 0.25 * cfg.period);
  const double dz = cfg.period / 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(step_unitary(h, dz));
}
BENCHMARK(BM_StepUnitary)->Arg(4)->Arg(20)->Arg(80);

void BM_Monodromy(benchmark::State& state) {
  const LatticeConfig cfg = driven_chain(static_cast<int>(state.range(0)), 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(monodromy(cfg, 1000));
}
BENCHMARK(BM_Monodromy)->Arg(8)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_SpectrumPoint(benchmark::State& state) {
  const LatticeConfig cfg = driven_chain(static_cast<int>(state.range(0)), 0.7);
  const ClassifyThresholds thr = default_thresholds(cfg.n_sites);
  for (auto _ : state)
    benchmark::DoNotOptimize(band_sweep(cfg, {0.7}, thr, 1000));
  state.SetLabel("monodromy + eigenphases + labels");
}
BENCHMARK(BM_SpectrumPoint)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& state) {
  const LatticeConfig cfg = driven_chain(8, 0.7);
  StateVector input = StateVector::Zero(8);
  input[0] = 1.0;
  const double dz = cfg.period / 1000.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(propagate(cfg, input, cfg.period, dz, 100));
  state.SetLabel("one period, 1000 steps");
}
BENCHMARK(BM_Propagate)->Unit(benchmark::kMillisecond);

void BM_ProjectEffective(benchmark::State& state) {
  LatticeConfig cfg;
  cfg.n_sites = static_cast<int>(state.range(0));
  cfg.kappa0 = 0.042;
  cfg.dkappa0 = 0.02;
  const Eigen::MatrixXcd h =
      build_hamiltonian(cfg, 0.0).cast<std::complex<double>>();
  const SubspacePartition part = outer_partition(cfg.n_sites);
  for (auto _ : state) benchmark::DoNotOptimize(project_effective(h, part));
}
BENCHMARK(BM_ProjectEffective)->Arg(8)->Arg(40)->Arg(80);

}  // namespace

BENCHMARK_MAIN();
