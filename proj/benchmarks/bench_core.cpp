#include <benchmark/benchmark.h>

#include "hyperuni/block_model.hpp"
#include "hyperuni/embedder.hpp"
#include "hyperuni/generators.hpp"
#include "hyperuni/oracle.hpp"

using namespace hyperuni;

namespace {

// The calibrated scaled configuration (about 1.8M edges on 259 vertices).
ModelParams calibrated(double pstar_mult) { return compute_params({3, 2000, 2, ModelMode::scaled, 0.25, pstar_mult}); }

void BM_SampleStrata(benchmark::State& state) {
    const auto params = calibrated(static_cast<double>(state.range(0)) * 1e-7);
    std::uint64_t seed = 0;
    std::size_t edges = 0;
    for (auto _ : state) {
        for (const auto& s : sample_strata(params, ++seed, {}, 1)) edges += s.count(3);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(edges));
}
BENCHMARK(BM_SampleStrata)->Arg(1)->Arg(10)->Arg(36)->Unit(benchmark::kMillisecond);

void BM_LinkIndex(benchmark::State& state) {
    const auto host = sample_model(calibrated(3.6e-6), 1, {}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(LinkIndex(host.graph()));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(host.graph().num_edges()));
}
BENCHMARK(BM_LinkIndex)->Unit(benchmark::kMillisecond);

void BM_Embed(benchmark::State& state) {
    const auto host = sample_model(calibrated(3.6e-6), 1, {}, 1);
    const auto family = state.range(0) == 0 ? GuestFamily::uniform : GuestFamily::capped;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        state.PauseTiming();
        const auto guest = generate({3, 100, 2, family, ++seed});
        const auto ord = degeneracy_ordering(guest).ordering;
        state.ResumeTiming();
        benchmark::DoNotOptimize(embed(guest, ord, host));
    }
}
BENCHMARK(BM_Embed)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Degeneracy(benchmark::State& state) {
    const auto guest = gen_uniform({3, static_cast<std::size_t>(state.range(0)), 2, GuestFamily::uniform, 7});
    for (auto _ : state) benchmark::DoNotOptimize(degeneracy_ordering(guest));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Degeneracy)->RangeMultiplier(8)->Range(64, 32768)->Complexity();

void BM_Enumerate(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(enumerate_class(2, static_cast<std::size_t>(state.range(0)), 2, {},
                                                 [](const Hypergraph&) { return true; }));
}
BENCHMARK(BM_Enumerate)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
