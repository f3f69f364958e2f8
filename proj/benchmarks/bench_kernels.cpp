#include <benchmark/benchmark.h>

#include "ctns/chemotaxis.hpp"
#include "ctns/fluid.hpp"
#include "ctns/sim.hpp"

namespace {

using namespace ctns;

SimConfig prototype(int m) {
  SimConfig c;
  c.grid.nx = c.grid.ny = m;
  c.initial.u = VelocityInit::VortexPair;
  return c;
}

void BM_Laplacian(benchmark::State& st) {
  const State s = initial_state(prototype(int(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(laplacian(s.n));
}
BENCHMARK(BM_Laplacian)->Arg(64)->Arg(256);

void BM_GradientDivergence(benchmark::State& st) {
  const State s = initial_state(prototype(int(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(divergence(gradient(s.c)));
}
BENCHMARK(BM_GradientDivergence)->Arg(64)->Arg(256);

void BM_HelmholtzSolve(benchmark::State& st) {
  const State s = initial_state(prototype(int(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(laplacian_solve(s.n, 2.5e-4));
}
BENCHMARK(BM_HelmholtzSolve)->Arg(64)->Arg(128);

void BM_Projection(benchmark::State& st) {
  const State s = initial_state(prototype(int(st.range(0))));
  const VectorField w = gradient(s.n);
  for (auto _ : st) benchmark::DoNotOptimize(helmholtz_project(w));
}
BENCHMARK(BM_Projection)->Arg(64)->Arg(128);

void BM_NsStep(benchmark::State& st) {
  const SimConfig c = prototype(64);
  const State s = initial_state(c);
  const VectorField gp = c.coefficients.potential(s.n.grid()).face_gradient(s.n.grid());
  FluidStepParams p;
  for (auto _ : st) benchmark::DoNotOptimize(ns_step(s.u, s.n, gp, p));
}
BENCHMARK(BM_NsStep);

void BM_TransportSteps(benchmark::State& st) {
  const SimConfig c = prototype(64);
  const State s = initial_state(c);
  TransportStepParams p;
  const Sensitivity chi = Sensitivity::constant(1.0);
  const Consumption f = Consumption::linear();
  const RegularizedF F{0.0};
  for (auto _ : st) {
    const ScalarField n1 = n_step(s.n, s.c, s.u, chi, F, p);
    benchmark::DoNotOptimize(c_step(s.c, n1, s.u, f, F, p));
  }
}
BENCHMARK(BM_TransportSteps);

void BM_CoupledRun(benchmark::State& st) {
  SimConfig c = prototype(64);
  c.fluid.t_end = 10 * c.fluid.dt;
  c.output.record_every = 10;
  for (auto _ : st) benchmark::DoNotOptimize(run(c));
  st.SetItemsProcessed(st.iterations() * 10);
}
BENCHMARK(BM_CoupledRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
