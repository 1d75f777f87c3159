// Serial reference against the OpenMP path for the frequency-domain kernels.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "oogsec/gridgen.hpp"
#include "oogsec/oracle.hpp"
#include "oogsec/system.hpp"

using namespace oogsec;

namespace {

const AggregatedSystem& default_grid() {
    static const AggregatedSystem agg = [] {
        const auto [sc, su] = build_partitioned_system(make_grid());
        return aggregate(sc, su);
    }();
    return agg;
}

// Two-bus ring: small enough for the multiplier search to dominate.
const std::pair<CertainSubsystem, UncertainSubsystem>& small_pair() {
    static const auto pair = [] {
        GridOptions o;
        o.topology = Topology::Ring;
        o.n_certain = 2;
        o.n_uncertain = 1;
        o.n_attack = 1;
        o.n_monitor = 1;
        return build_partitioned_system(make_grid(o));
    }();
    return pair;
}

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::Serial : Execution::Parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_TabulateGrams(benchmark::State& state) {
    const auto& agg = default_grid();
    const auto grid = FrequencyGrid::for_dynamics(agg.A_bar);
    for (auto _ : state) {
        auto t = tabulate_grams(agg.A_bar, agg.F_bar, {{agg.Cp_bar, agg.Fp_bar}, {agg.Cr_bar, agg.Fr_bar}},
                                grid.points, mode(state));
        benchmark::DoNotOptimize(t);
    }
    label(state);
}

void BM_GainProfile(benchmark::State& state) {
    const auto& agg = default_grid();
    const StateSpace sys{agg.A_bar, agg.F_bar, agg.Cp_bar, agg.Fp_bar};
    const auto grid = FrequencyGrid::for_dynamics(agg.A_bar);
    for (auto _ : state) {
        auto p = gain_profile(sys, grid.points, mode(state));
        benchmark::DoNotOptimize(p);
    }
    label(state);
}

void BM_OogOracle(benchmark::State& state) {
    const auto& [sc, su] = small_pair();
    for (auto _ : state) {
        auto r = oog_oracle(sc, su, {1.0, 1.0}, std::nullopt, {}, mode(state));
        benchmark::DoNotOptimize(r);
    }
    label(state);
}

void BM_ProxyOracle(benchmark::State& state) {
    const auto& sc = small_pair().first;
    const MultiplierGridSpec spec{1e-4, 1e6, 30, 6};
    for (auto _ : state) {
        auto r = proxy_oracle(sc, 1.0, {1.0, 1.0}, FrequencyGrid::logarithmic(1e-3, 1e3, 200), spec, mode(state));
        benchmark::DoNotOptimize(r);
    }
    label(state);
}

}  // namespace

BENCHMARK(BM_TabulateGrams)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GainProfile)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OogOracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ProxyOracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
