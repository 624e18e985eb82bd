#include <cmath>
#include <random>

#include "doctest.h"
#include "oligo/market.hpp"

using namespace oligo;

namespace {

MarketParams fig_market(int l, int m) {
    MarketParams p;
    p.l = l;
    p.demand = DemandModel::fixed_demand(m);
    p.n = 3;
    p.v = 100;
    p.c = 1;
    return p;
}

}  // namespace

TEST_CASE("win_prob boundary and hand values") {
    MarketParams p;
    p.l = 3;
    p.demand = DemandModel::fixed_demand(1);
    CHECK(win_prob(0.0, p) == doctest::Approx(0.0));
    CHECK(win_prob(1.0, p) == doctest::Approx(1.0));
    // 1 - P(no success in 2 trials) = 1 - 0.25
    CHECK(win_prob(0.5, p) == doctest::Approx(0.75));
    CHECK_THROWS_AS(win_prob(-0.1, p), invalid_params);
    CHECK_THROWS_AS(win_prob(1.1, p), invalid_params);
}

TEST_CASE("win_prob mixes over a demand pmf") {
    MarketParams p;
    p.l = 3;
    p.demand = DemandModel::random_demand({0.5, 0.5});
    // 0.5 * P(B(2,0.5) >= 1) + 0.5 * P(B(2,0.5) >= 2)
    CHECK(win_prob(0.5, p) == doctest::Approx(0.5 * 0.75 + 0.5 * 0.25));
}

TEST_CASE("win_prob is strictly increasing and invertible") {
    MarketParams p = fig_market(20, 6);
    // stay below x ~ 0.9 where the tail saturates to 1.0 in doubles
    double prev = 0;
    for (int i = 1; i <= 45; ++i) {
        double x = i / 50.0;
        double y = win_prob(x, p);
        CHECK(y > prev);
        prev = y;
    }
    CHECK(win_prob(1.0, p) >= prev);
    CHECK(win_prob_inverse(0.0, p) == doctest::Approx(0.0));
    std::mt19937_64 rng(11);
    for (int it = 0; it < 100; ++it) {
        // keep the derivative bounded away from zero so the inverse is
        // well-conditioned at double precision
        double x = 0.05 + 0.75 * ((rng() >> 11) * 0x1.0p-53);
        CHECK(win_prob_inverse(win_prob(x, p), p) == doctest::Approx(x).epsilon(1e-10));
    }
    MarketParams small;
    small.l = 3;
    small.demand = DemandModel::fixed_demand(1);
    CHECK(win_prob_inverse(0.75, small) == doctest::Approx(0.5));
    CHECK_THROWS_AS(win_prob_inverse(1.5, small), invalid_params);
}

TEST_CASE("penalty families invert and order correctly") {
    for (const char* name : {"additive-cubic", "quadratic-cubic"}) {
        auto family = PenaltyFamily::by_name(name);
        for (int i = 1; i <= 3; ++i)
            for (double x = 2; x < 100; x += 7.3) {
                CHECK(family.f(family.g(x, i), i) == doctest::Approx(x).epsilon(1e-9));
                // price for a given penalty rises with the state index
                if (i < 3) CHECK(family.f(x, i) < family.f(x, i + 1));
                // penalty strictly increasing in price
                CHECK(family.g(x + 0.5, i) > family.g(x, i));
            }
    }
    CHECK_THROWS_AS(PenaltyFamily::by_name("nope"), invalid_params);
}

TEST_CASE("ratio monotonicity audit") {
    std::mt19937_64 rng(3);
    auto ok = check_ratio_monotonicity(PenaltyFamily::additive_cubic(), 3, 1.0, 100.0, 500, rng);
    CHECK(ok.ok);
    ok = check_ratio_monotonicity(PenaltyFamily::quadratic_cubic(), 3, 1.0, 100.0, 500, rng);
    CHECK(ok.ok);
    // exponential family: the payoff ratio (f_i - c)/(f_j - c) for i < j
    // decreases in the penalty, so the audit must flag it
    PenaltyFamily decreasing;
    decreasing.kind = "custom";
    decreasing.f = [](double x, int i) { return std::exp(i * x / 50.0); };
    decreasing.g = [](double x, int i) { return 50.0 * std::log(x) / i; };
    auto bad = check_ratio_monotonicity(decreasing, 3, 1.0, 100.0, 500, rng);
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.witness.empty());
}

TEST_CASE("single-location pricing chain regression") {
    MarketParams p = fig_market(20, 10);
    auto family = PenaltyFamily::additive_cubic();
    auto sol = solve_single_location(p, family, {0.2, 0.2, 0.2});
    REQUIRE(sol.n() == 3);
    CHECK(sol.U[0] == doctest::Approx(100.0));
    CHECK(sol.L[0] == doctest::Approx(22.864).epsilon(1e-4));
    CHECK(sol.L[1] == doctest::Approx(17.345).epsilon(1e-4));
    CHECK(sol.L[2] == doctest::Approx(17.2766).epsilon(1e-4));
    for (int j = 0; j < 2; ++j) CHECK(sol.U[j + 1] == doctest::Approx(sol.L[j]));
    for (int j = 0; j < 3; ++j) {
        CHECK(sol.L[j] <= sol.U[j]);
        CHECK(family.f(sol.L[j], j + 1) > p.c);
    }
}

TEST_CASE("degenerate pricing when demand covers all sellers") {
    MarketParams p = fig_market(3, 5);
    auto family = PenaltyFamily::additive_cubic();
    auto sol = solve_single_location(p, family, {0.2, 0.2, 0.2});
    CHECK(sol.degenerate);
    for (int j = 1; j <= 3; ++j) {
        CHECK(sol.L[j - 1] == p.v);
        CHECK(sol.U[j - 1] == p.v);
        CHECK(sol.p[j - 1] == doctest::Approx(family.f(p.v, j)));
    }
}

TEST_CASE("pricing rejects invalid inputs") {
    auto family = PenaltyFamily::additive_cubic();
    MarketParams p = fig_market(20, 6);
    CHECK_THROWS_AS(solve_single_location(p, family, {0.5, 0.4, 0.3}), invalid_params);
    MarketParams one = p;
    one.l = 1;
    CHECK_THROWS_AS(validate_market(one, family), invalid_params);
    MarketParams cheap = p;
    cheap.c = 200;  // f_j(v) <= c: no profitable sale
    CHECK_THROWS_AS(validate_market(cheap, family), invalid_params);
}

TEST_CASE("closed-form penalty sampling matches the CDF") {
    MarketParams p = fig_market(20, 6);
    auto family = PenaltyFamily::additive_cubic();
    std::vector<double> alpha{0.2, 0.2, 0.2};
    auto sol = solve_single_location(p, family, alpha);
    for (int j = 1; j <= 3; ++j) {
        for (double u = 0.02; u < 1.0; u += 0.07) {
            double x = sample_penalty(j, sol, alpha, p, family, u);
            CHECK(x >= sol.L[j - 1] - 1e-9);
            CHECK(x <= sol.U[j - 1] + 1e-9);
            // recovering u divides a cancelling price difference by the local
            // tail slope, so the roundtrip carries a few 1e-9 of noise
            CHECK(std::abs(penalty_cdf(x, j, sol, alpha, p, family) - u) < 5e-8);
        }
        CHECK(penalty_cdf(sol.L[j - 1], j, sol, alpha, p, family) ==
              doctest::Approx(0.0).epsilon(1e-9));
        CHECK(penalty_cdf(sol.U[j - 1], j, sol, alpha, p, family) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("expected payoff is flat on the support and lower outside") {
    MarketParams p = fig_market(20, 10);
    auto family = PenaltyFamily::additive_cubic();
    std::vector<double> alpha{0.2, 0.2, 0.2};
    auto sol = solve_single_location(p, family, alpha);
    for (int j = 1; j <= 3; ++j) {
        double target = sol.p[j - 1] - p.c;
        for (int i = 0; i <= 20; ++i) {
            double x = sol.L[j - 1] + (sol.U[j - 1] - sol.L[j - 1]) * i / 20.0;
            CHECK(expected_payoff_at(x, j, alpha, sol, p, family) ==
                  doctest::Approx(target).epsilon(1e-9));
        }
        if (j < 3)
            CHECK(expected_payoff_at(sol.L[j - 1] - 1e-3, j, alpha, sol, p, family) <
                  target - 1e-12);
        if (j > 1)
            CHECK(expected_payoff_at(sol.U[j - 1] + 1e-3, j, alpha, sol, p, family) <
                  target - 1e-12);
    }
}

TEST_CASE("demand model validation") {
    CHECK_THROWS_AS(DemandModel::fixed_demand(0), invalid_params);
    CHECK_THROWS_AS(DemandModel::random_demand({0.5, 0.4}), invalid_params);
    auto d = DemandModel::random_demand({0.25, 0.75});
    CHECK(d.max_m() == 2);
    CHECK_FALSE(d.is_fixed());
}
