// Serial reference vs OpenMP batch kernels on the bundled theta-coupled metric.

#include <benchmark/benchmark.h>

#include <random>

#include "sgeo/batch.hpp"
#include "sgeo/model.hpp"

namespace {

using namespace sgeo;

const Model& fixture() {
  static const Model m = load_model(std::string(SGEO_MODEL_DIR) + "/theta_coupled_1_2.json");
  return m;
}

std::vector<InitialCondition> starts(int count) {
  const Model& m = fixture();
  std::vector<InitialCondition> out;
  for (int n = 0; n < count; ++n) {
    InitialCondition ic = m.initial_conditions[static_cast<std::size_t>(n) % m.initial_conditions.size()].ic;
    ic.position.values[0].add(0, 0.01 * n);
    out.push_back(std::move(ic));
  }
  return out;
}

Execution mode(const benchmark::State& s) { return s.range(0) ? Execution::parallel : Execution::serial; }

void BM_Christoffel(benchmark::State& state) {
  const auto pts = random_points(fixture().metric, 4, static_cast<int>(state.range(1)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(batch_christoffel(fixture().metric, pts, mode(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_Geodesics(benchmark::State& state) {
  const auto ics = starts(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(batch_geodesics(fixture().metric, ics, 0.5, 1e-3, mode(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_Flows(benchmark::State& state) {
  std::vector<PhasePoint> ps;
  for (const auto& ic : starts(static_cast<int>(state.range(1)))) ps.push_back(to_phase_point(fixture().metric, ic));
  for (auto _ : state) benchmark::DoNotOptimize(batch_flows(fixture().metric, ps, 0.5, 1e-3, mode(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_Exp(benchmark::State& state) {
  std::vector<TangentFiberPoint> vs;
  for (const auto& ic : starts(static_cast<int>(state.range(1))))
    vs.push_back({{ic.position.values[0].body()}, ic.L, ic.velocity});
  for (auto _ : state) benchmark::DoNotOptimize(batch_exp(fixture().metric, vs, 1e-3, mode(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

// Arg pairs: {0 = serial, 1 = parallel, batch size}.
BENCHMARK(BM_Christoffel)->ArgsProduct({{0, 1}, {256}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Geodesics)->ArgsProduct({{0, 1}, {16}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Flows)->ArgsProduct({{0, 1}, {16}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Exp)->ArgsProduct({{0, 1}, {16}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
