#include "bqwave/fixedpoint.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace bqwave;

namespace {

fixedpoint::Setup setup_for(int n) {
  fixedpoint::Setup s;
  s.cs = std::make_shared<const geometry::CrossSection>(geometry::build_rectangle(0.5, 0.5, n, n));
  s.phys.reaction.k = 4.0;
  return s;
}

fixedpoint::FixedPointConfig config() {
  fixedpoint::FixedPointConfig cfg;
  cfg.a_schedule = {10.0};
  return cfg;
}

void BM_TemperatureSolve(benchmark::State& st) {
  const auto setup = setup_for(static_cast<int>(st.range(0)));
  const auto cfg = config();
  const auto state = fixedpoint::initial_state(setup, cfg, 10.0);
  temperature::TemperatureProblem prob;
  prob.box = state.grid.temperature_box();
  prob.c = state.c;
  prob.tau = 1.0;
  prob.v = &state.v;
  prob.z = &state.t;
  prob.reaction = setup.phys.reaction;
  for (auto _ : st) benchmark::DoNotOptimize(temperature::solve_temperature(prob));
}
BENCHMARK(BM_TemperatureSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_FlowSolve(benchmark::State& st) {
  const auto setup = setup_for(static_cast<int>(st.range(0)));
  const auto cfg = config();
  const auto state = fixedpoint::initial_state(setup, cfg, 10.0);
  const auto t_ext = fields::extend_temperature(state.t, state.grid);
  flow::FlowProblem prob;
  prob.box = state.grid.flow_box();
  prob.c = state.c;
  prob.tau = 1.0;
  prob.t_ext = &t_ext;
  for (auto _ : st) benchmark::DoNotOptimize(flow::solve_flow(prob));
}
BENCHMARK(BM_FlowSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_EvaluateKa(benchmark::State& st) {
  const auto setup = setup_for(static_cast<int>(st.range(0)));
  auto cfg = config();
  auto state = fixedpoint::initial_state(setup, cfg, 10.0);
  state.tau = 1.0;
  for (auto _ : st) benchmark::DoNotOptimize(fixedpoint::evaluate_Ka(state, setup, cfg));
}
BENCHMARK(BM_EvaluateKa)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_HelmholtzProject(benchmark::State& st) {
  const auto setup = setup_for(static_cast<int>(st.range(0)));
  fields::AxialGrid grid(10.0, 32, 4.0, setup.cs);
  fields::VectorField g(grid.flow_box());
  g.u.setConstant(1.0);
  g.w.setLinSpaced(-1.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(fields::helmholtz_project(g));
}
BENCHMARK(BM_HelmholtzProject)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
