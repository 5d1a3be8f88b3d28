#include <benchmark/benchmark.h>

#include "seqinf/calibration.hpp"
#include "seqinf/experiments.hpp"
#include "seqinf/study.hpp"

using namespace seqinf;

namespace {

void horizontal_table(benchmark::State& state, Execution exec)
{
    TableOptions o;
    o.reps = static_cast<std::size_t>(state.range(0));
    o.dt = 1e-3;
    o.execution = exec;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_null_table(StoppingRuleSpec{HorizontalRule{}}, o));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void thompson_table(benchmark::State& state, Execution exec)
{
    BatchedTableOptions o;
    o.reps = static_cast<std::size_t>(state.range(0));
    o.execution = exec;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_null_table(BatchedPolicySpec{ThompsonPolicy{}}, o));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void horizontal_experiments(benchmark::State& state, Execution exec)
{
    const auto reps = static_cast<std::size_t>(state.range(0));
    std::vector<double> tau(reps);
    for (auto _ : state) {
        for_each_index(reps, exec, [&](std::size_t r) {
            tau[r] = run_horizontal_experiment(DGPSpec::local(0.0, 0.0, 2000), HorizontalDesign{},
                                               replication_seed(7, r))
                         .outcome.tau;
        });
        benchmark::DoNotOptimize(tau.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK_CAPTURE(horizontal_table, serial, Execution::serial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(horizontal_table, parallel, Execution::parallel)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(thompson_table, serial, Execution::serial)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(thompson_table, parallel, Execution::parallel)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(horizontal_experiments, serial, Execution::serial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(horizontal_experiments, parallel, Execution::parallel)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
