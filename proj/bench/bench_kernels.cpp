// Serial reference loops against the blocked OpenMP kernels.
// Arg 0 selects the path: 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include <vector>

#include "sgn/covering.hpp"
#include "sgn/problems/ddc.hpp"
#include "sgn/problems/quantile.hpp"
#include "sgn/problems/quantreg.hpp"
#include "sgn/smoothing.hpp"

namespace {

using sgn::Execution;

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_QuantileSmoothed(benchmark::State& state) {
  const auto prob = sgn::QuantileProblem::generate_normal(static_cast<std::size_t>(state.range(1)), 0.7, 1);
  const auto exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(prob.smoothed(0.5, 0.1, exec));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  label(state);
}
BENCHMARK(BM_QuantileSmoothed)->ArgsProduct({{0, 1}, {250, 100000}});

void BM_QuantRegSmoothed(benchmark::State& state) {
  const auto prob = sgn::QuantRegProblem::generate(static_cast<std::size_t>(state.range(1)), 5, 2, 0.5, 2);
  const sgn::ParamVector theta = sgn::ParamVector::Constant(5, 0.3);
  const auto exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(prob.smoothed(theta, 0.1, exec));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  label(state);
}
BENCHMARK(BM_QuantRegSmoothed)->ArgsProduct({{0, 1}, {500, 50000}});

void BM_DdcSimulatedOls(benchmark::State& state) {
  sgn::DdcDesign design;
  design.n = state.range(1);
  design.T = 10;
  design.beta_dim = 14;
  const auto prob = sgn::DdcProblem::generate(design, 3, 4);
  const auto theta = sgn::ddc_true_params(design.beta_dim);
  const auto exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(prob.simulated_ols(theta, 0.0, exec));
  state.SetItemsProcessed(state.iterations() * state.range(1) * design.T);
  label(state);
}
BENCHMARK(BM_DdcSimulatedOls)->ArgsProduct({{0, 1}, {250, 5000}});

void BM_Discrepancy(benchmark::State& state) {
  const auto box = sgn::ParamBox::cube(2, 0.0, 1.0);
  sgn::CoveringSequence seq(box);
  std::vector<sgn::ParamVector> pts;
  for (int k = 0; k < 256; ++k) pts.push_back(seq.next_point());
  const auto probes = sgn::sobol_probes(box, static_cast<std::size_t>(state.range(1)));
  const auto exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(sgn::discrepancy(pts, probes, exec));
  label(state);
}
BENCHMARK(BM_Discrepancy)->ArgsProduct({{0, 1}, {1 << 12, 1 << 16}});

void BM_McJacobian(benchmark::State& state) {
  const auto prob = sgn::QuantRegProblem::generate(2000, 5, 2, 0.5, 5);
  const sgn::ParamVector theta = sgn::ParamVector::Constant(5, 0.3);
  sgn::SmoothingConfig cfg;
  cfg.L = static_cast<int>(state.range(1));
  const auto exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(sgn::mc_jacobian(prob, theta, cfg, exec));
  label(state);
}
BENCHMARK(BM_McJacobian)->ArgsProduct({{0, 1}, {25, 200}});

}  // namespace

BENCHMARK_MAIN();
