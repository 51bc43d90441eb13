#include <benchmark/benchmark.h>

#include <vector>

#include "fibertrap/actuators.hpp"
#include "fibertrap/cavity.hpp"
#include "fibertrap/mechanics.hpp"
#include "solver_checks.hpp"

using namespace fibertrap;

static void BM_SolverManufactured(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(checks::manufactured_error(n, 0.3));
}
BENCHMARK(BM_SolverManufactured)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

static void BM_SolverPatch(benchmark::State& state) {
  const auto pp = checks::patch_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(electrostatics::solve(pp.right).values.data());
}
BENCHMARK(BM_SolverPatch)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

static void BM_CavitySweep(benchmark::State& state) {
  const auto& p = cavity::transition_preset("7c");
  cavity::CavitySpec spec;
  spec.finesse = p.finesse;
  std::vector<double> lengths;
  for (int i = 1; i <= 690; ++i) lengths.push_back(i * 1e-6);
  for (auto _ : state) benchmark::DoNotOptimize(cavity::sweep_length(spec, p.transition, lengths).data());
}
BENCHMARK(BM_CavitySweep);

static void BM_CombCurve(benchmark::State& state) {
  const auto susp = mechanics::SuspensionSpec::reference(4e-6);
  const double k = mechanics::suspension_stiffness(susp, mechanics::Axis::in_plane);
  for (auto _ : state) benchmark::DoNotOptimize(actuators::comb_stroke_curve({}, k, 300.0, 300).fit_coefficient);
}
BENCHMARK(BM_CombCurve);

static void BM_PlateCurve(benchmark::State& state) {
  const auto susp = mechanics::SuspensionSpec::reference(4e-6);
  const double k = mechanics::suspension_stiffness(susp, mechanics::Axis::vertical);
  for (auto _ : state) benchmark::DoNotOptimize(actuators::plate_stroke_curve({}, k, 240.0, 240).fit_coefficient);
}
BENCHMARK(BM_PlateCurve);

static void BM_ModalFrequencies(benchmark::State& state) {
  const mechanics::LoadSpec load;
  for (auto _ : state) {
    for (double w : {4e-6, 5e-6, 6e-6, 8e-6}) {
      benchmark::DoNotOptimize(mechanics::modal_frequencies(mechanics::SuspensionSpec::reference(w), load, true));
    }
  }
}
BENCHMARK(BM_ModalFrequencies);

BENCHMARK_MAIN();
