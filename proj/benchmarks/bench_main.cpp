#include <benchmark/benchmark.h>

#include "mdm/analytic.hpp"
#include "mdm/bitslice.hpp"
#include "mdm/circuit.hpp"
#include "mdm/experiments.hpp"

namespace {

void BM_MeshSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const mdm::BitTile tile = mdm::gen_random_tile(n, n, 0.8, 7);
    const mdm::ResistanceParams params;
    for (auto _ : state) {
        auto m = mdm::measured_nf(tile, params);
        benchmark::DoNotOptimize(m.aggregate);
    }
    state.SetLabel(std::to_string(2 * n * n - 2 * n) + " unknowns");
}
BENCHMARK(BM_MeshSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_AnalyticNf(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const mdm::BitTile tile = mdm::gen_random_tile(n, n, 0.8, 7);
    const mdm::ResistanceParams params;
    for (auto _ : state) {
        auto p = mdm::analytic_nf(tile, params);
        benchmark::DoNotOptimize(p.nf_sum);
    }
}
BENCHMARK(BM_AnalyticNf)->Arg(64)->Arg(128);

void BM_MdmMap(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto dist = mdm::WeightDistribution::half_normal(0.05);
    const mdm::BitTile tile = mdm::gen_dnn_like_tile(dist, n, n, 11);
    for (auto _ : state) {
        auto r = mdm::mdm_map(tile);
        benchmark::DoNotOptimize(r.plan.row_perm.data());
    }
}
BENCHMARK(BM_MdmMap)->Arg(64)->Arg(128);

void BM_Quantize(benchmark::State& state) {
    const auto dist = mdm::WeightDistribution::half_normal(0.05);
    const mdm::WeightMatrix w = mdm::sample_weight_matrix(dist, 64, 8, 3);
    const auto sigs = mdm::contiguous_significances(1, 8);
    for (auto _ : state) {
        auto q = mdm::quantize(w, sigs);
        benchmark::DoNotOptimize(q.tile.delta.data());
    }
}
BENCHMARK(BM_Quantize);

}  // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    return 0;
}
