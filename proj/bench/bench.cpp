// Serial reference against the OpenMP kernels. Argument 0 is serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "spaceform/catalog.hpp"
#include "spaceform/developing.hpp"
#include "spaceform/kahler.hpp"
#include "spaceform/probes.hpp"
#include "spaceform/sampling.hpp"

using namespace spaceform;

namespace {

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? ExecPolicy::serial : ExecPolicy::parallel;
}

void BM_verify_space_form(benchmark::State& state) {
  const MetricField f = catalog("bergman", {});
  const auto samples = shell_samples(f.domain(), 2, 100, 0.0, 0.9, 0);
  SpaceFormOptions o;
  o.policy = policy_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(verify_space_form(f, samples, -4.0, o));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(samples.size()));
}

void BM_develop_region(benchmark::State& state) {
  CatalogParams p;
  p.punctures.push_back(Puncture::closed_ball(CVec::Zero(2), 0.2));
  const MetricField f = catalog("bergman", p);
  const ModelSpace m(-4, 2);
  const auto samples = shell_samples(f.domain(), 2, 100, 0.3, 0.7, 1);
  const Germ base = initial_germ(f, m, from_list({cplx(0.5), cplx(0.0)}));
  DevelopOptions o;
  o.policy = policy_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(develop_region(f, m, base, samples, o));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(samples.size()));
}

void BM_jacobian_minimum(benchmark::State& state) {
  const RealMap f = f_minus_one_map(3);
  const auto grid = punctured_grid(3, 20, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(jacobian_minimum(f, grid, policy_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

}  // namespace

BENCHMARK(BM_verify_space_form)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_develop_region)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_jacobian_minimum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
