#include <benchmark/benchmark.h>

#include <random>

#include "oligo/graph.hpp"
#include "oligo/market.hpp"
#include "oligo/mean_valid.hpp"
#include "oligo/simulate.hpp"

using namespace oligo;

namespace {

MarketParams reference_market() {
    MarketParams p;
    p.l = 20;
    p.demand = DemandModel::fixed_demand(6);
    p.n = 3;
    p.v = 100;
    p.c = 1;
    return p;
}

void bm_pricing_solve(benchmark::State& state) {
    auto params = reference_market();
    auto family = PenaltyFamily::additive_cubic();
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_single_location(params, family, {0.2, 0.2, 0.2}));
}
BENCHMARK(bm_pricing_solve);

void bm_mean_valid_solve(benchmark::State& state) {
    auto params = reference_market();
    auto family = PenaltyFamily::additive_cubic();
    SameStateModel model{{0.2, 0.2, 0.2}};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_mean_valid({9, 6, 6, 4}, model, params, family));
}
BENCHMARK(bm_mean_valid_solve);

void bm_maximal_sets_king5(benchmark::State& state) {
    auto g = ConflictGraph::king_grid(5);
    for (auto _ : state) benchmark::DoNotOptimize(independent_sets(g, ISMode::Maximal));
}
BENCHMARK(bm_maximal_sets_king5);

void bm_penalty_sample(benchmark::State& state) {
    auto params = reference_market();
    auto family = PenaltyFamily::additive_cubic();
    std::vector<double> alpha{0.2, 0.2, 0.2};
    auto sol = solve_single_location(params, family, alpha);
    std::mt19937_64 rng(1);
    double u = 0.0;
    for (auto _ : state) {
        u += 0.618033988749895;
        if (u >= 1) u -= 1;
        benchmark::DoNotOptimize(sample_penalty(2, sol, alpha, params, family, u));
    }
}
BENCHMARK(bm_penalty_sample);

void bm_market_round(benchmark::State& state) {
    MeanValidProfile profile;
    profile.partition.sets = {{0, 2, 4, 10, 12, 14, 20, 22, 24},
                              {1, 3, 11, 13, 21, 23},
                              {5, 7, 9, 15, 17, 19},
                              {6, 8, 16, 18}};
    profile.model.q = {0.2, 0.2, 0.2};
    profile.params = reference_market();
    profile.family = PenaltyFamily::additive_cubic();
    profile.eq = solve_mean_valid({9, 6, 6, 4}, profile.model, profile.params, profile.family);
    auto g = ConflictGraph::king_grid(5);
    std::mt19937_64 rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(run_round(profile, g, rng));
}
BENCHMARK(bm_market_round);

void bm_collusion_optimum(benchmark::State& state) {
    auto g = ConflictGraph::king_grid(3);
    MarketParams params = reference_market();
    params.l = 10;
    params.demand = DemandModel::fixed_demand(2);
    CollusionOptimizer optimizer(g, params, PenaltyFamily::additive_cubic());
    std::mt19937_64 rng(1);
    std::vector<int> states(10);
    for (auto _ : state) {
        for (auto& s : states) s = static_cast<int>(rng() % 4);
        benchmark::DoNotOptimize(optimizer.optimum_same_state(states));
    }
}
BENCHMARK(bm_collusion_optimum);

}  // namespace

BENCHMARK_MAIN();
