#include <cmath>
#include <random>

#include "doctest.h"
#include "oligo/mean_valid.hpp"
#include "property_configs.hpp"

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

}  // namespace

TEST_CASE("four-set reference equilibrium") {
    auto params = reference_market();
    auto family = PenaltyFamily::additive_cubic();
    SameStateModel model{{0.2, 0.2, 0.2}};
    auto eq = solve_mean_valid({9, 6, 6, 4}, model, params, family);

    // selection matrix, worst state first
    CHECK(eq.t[0][0] == doctest::Approx(0.0710).epsilon(2e-2));
    CHECK(eq.t[0][1] == doctest::Approx(0.4645).epsilon(1e-3));
    CHECK(eq.t[0][2] == doctest::Approx(0.4645).epsilon(1e-3));
    CHECK(eq.t[0][3] == doctest::Approx(0.0));
    CHECK(eq.t[1][0] == doctest::Approx(0.2532).epsilon(1e-3));
    CHECK(eq.t[1][1] == doctest::Approx(0.3734).epsilon(1e-3));
    CHECK(eq.t[2][0] == doctest::Approx(1.0));
    CHECK(eq.d == std::vector<int>{3, 3, 1});

    // the supported level at the best state: M_1 * (1 - w(gamma_{1,3}))
    double level = 9 * (1.0 - win_prob(eq.gamma[2][0], params));
    CHECK(level == doctest::Approx(7.5324).epsilon(2e-4));

    // symmetric cardinalities must get symmetric treatment
    for (int j = 0; j < 3; ++j) CHECK(eq.t[j][1] == doctest::Approx(eq.t[j][2]).epsilon(1e-12));
}

TEST_CASE("per-set payoffs are equalized on the support") {
    auto params = reference_market();
    auto family = PenaltyFamily::additive_cubic();
    SameStateModel model{{0.2, 0.2, 0.2}};
    auto eq = solve_mean_valid({9, 6, 6, 4}, model, params, family);
    for (int j = 1; j <= 3; ++j) {
        double ref = eq.M[0] * (eq.pricing[0].p[j - 1] - params.c);
        for (int s = 2; s <= eq.d[j - 1]; ++s)
            CHECK(eq.M[s - 1] * (eq.pricing[s - 1].p[j - 1] - params.c) ==
                  doctest::Approx(ref).epsilon(1e-9));
        CHECK(eq.payoff[j - 1] == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("degenerate demand selects the largest set deterministically") {
    auto params = reference_market();
    params.demand = DemandModel::fixed_demand(25);  // >= l
    SameStateModel model{{0.2, 0.2, 0.2}};
    auto eq = solve_mean_valid({9, 6, 6, 4}, model, params, PenaltyFamily::additive_cubic());
    CHECK(eq.degenerate);
    for (int j = 0; j < 3; ++j) {
        CHECK(eq.t[j][0] == 1.0);
        CHECK(eq.d[j] == 1);
    }
}

TEST_CASE("a zero-probability state carries no mass decisions") {
    auto params = reference_market();
    SameStateModel model{{0.2, 0.0, 0.2}};
    auto eq = solve_mean_valid({9, 6, 6, 4}, model, params, PenaltyFamily::additive_cubic());
    double row = 0;
    for (double t : eq.t[1]) row += t;
    CHECK(row == doctest::Approx(1.0));
    for (int s = 0; s < 4; ++s) CHECK(eq.alpha[s][1] == 0.0);
}

TEST_CASE("input validation") {
    auto family = PenaltyFamily::additive_cubic();
    auto params = reference_market();
    SameStateModel model{{0.2, 0.2, 0.2}};
    CHECK_THROWS_AS(solve_mean_valid({6, 9, 4}, model, params, family), invalid_params);
    CHECK_THROWS_AS(solve_mean_valid({}, model, params, family), invalid_params);
    SameStateModel wrong{{0.2, 0.2}};
    CHECK_THROWS_AS(solve_mean_valid({9, 6}, wrong, params, family), invalid_params);
    SameStateModel heavy{{0.5, 0.4, 0.3}};
    CHECK_THROWS_AS(solve_mean_valid({9, 6}, heavy, params, family), invalid_params);
}

TEST_CASE("randomized structural properties") {
    std::mt19937_64 rng(2024);
    for (int it = 0; it < 30; ++it) {
        auto cfg = make_random_config(rng);
        auto eq = solve_mean_valid(cfg.M, cfg.model, cfg.params, cfg.family, 0.35);
        auto rerun = solve_mean_valid(cfg.M, cfg.model, cfg.params, cfg.family, 0.65);
        auto problem = check_structure(cfg, eq, rerun);
        INFO("config ", it, ": ", problem);
        CHECK(problem.empty());
    }
}

TEST_CASE("best-response audit accepts the equilibrium and rejects a perturbation") {
    auto g = ConflictGraph::king_grid(3);
    Partition partition{{{0, 2, 6, 8}, {1, 7}, {3, 5}, {4}}};
    auto params = reference_market();
    auto family = PenaltyFamily::additive_cubic();
    SameStateModel model{{0.2, 0.2, 0.2}};
    auto eq = solve_mean_valid(partition.cardinalities(), model, params, family);
    auto report = best_response_audit(g, partition, eq, model, params, family);
    CHECK(report.pass);
    CHECK(report.partition_sets_attain);
    for (int j = 0; j < 3; ++j)
        CHECK(report.best_deviation[j] <= report.conforming[j] + 1e-9);

    auto t = eq.t;
    double shift = std::min(0.1, t[0][1]);
    t[0][1] -= shift;
    t[0][0] += shift;
    auto perturbed = equilibrium_from_t(t, eq.M, model, params, family);
    auto bad = best_response_audit(g, partition, perturbed, model, params, family);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.witness.has_value());
    CHECK(bad.witness->payoff > bad.witness->reference + 1e-9);
}

TEST_CASE("equivalent partitions induce identical offer probabilities") {
    // 4-cycle plus a disjoint edge admits two different valid partitions with
    // cardinalities (3, 3)
    auto g = ConflictGraph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {4, 5}});
    Partition a{{{0, 2, 4}, {1, 3, 5}}};
    Partition b{{{0, 2, 5}, {1, 3, 4}}};
    auto params = reference_market();
    SameStateModel model{{0.2, 0.2, 0.2}};
    auto family = PenaltyFamily::additive_cubic();
    auto report = partition_equivalence_audit(g, a, b, model, params, family);
    INFO(report.detail);
    CHECK(report.pass);
    CHECK(report.max_alpha_diff < 1e-9);
}
