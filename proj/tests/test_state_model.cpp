#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oligo/market.hpp"
#include "oligo/state_model.hpp"

using namespace oligo;

TEST_CASE("IID joint is a product measure") {
    auto g = ConflictGraph::cycle(4);
    auto model = ChannelStateModel::iid(0.3);
    auto table = joint_table(model, g);
    double total = std::accumulate(table.begin(), table.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(joint_prob(model, g, uint32_t{0}) == doctest::Approx(std::pow(0.7, 4)));
    CHECK(joint_prob(model, g, uint32_t{0b1111}) == doctest::Approx(std::pow(0.3, 4)));
}

TEST_CASE("sampled-IID equals IID at the product rate, exactly") {
    auto g = ConflictGraph::cycle(4);
    auto a = joint_table(ChannelStateModel::sampled_iid(0.5, 0.5), g);
    auto b = joint_table(ChannelStateModel::iid(0.25), g);
    REQUIRE(a.size() == b.size());
    for (size_t m = 0; m < a.size(); ++m) CHECK(a[m] == b[m]);  // bitwise
}

TEST_CASE("symmetric MRF on the 4-cycle") {
    auto g = ConflictGraph::cycle(4);
    auto model = ChannelStateModel::mrf({0.8, 0.2, 1.0});
    auto table = joint_table(model, g);
    double total = std::accumulate(table.begin(), table.end(), 0.0);
    CHECK(std::abs(total - 1.0) <= 1e-10);
    auto report = audit_isomorphism_invariance(model, g);
    CHECK(report.pass);
    CHECK(report.max_diff < 1e-10);
    CHECK(report.r_uniform);
    // hand check: single-node states are all rotations of each other
    CHECK(table[0b0001] == doctest::Approx(table[0b0100]).epsilon(1e-12));
    CHECK(table[0b0011] == doctest::Approx(table[0b1001]).epsilon(1e-12));
}

TEST_CASE("asymmetric perturbation breaks invariance") {
    auto g = ConflictGraph::cycle(4);
    auto table = joint_table(ChannelStateModel::mrf({0.8, 0.2, 1.0}), g);
    // move mass between two isomorphic single-node states
    table[0b0001] += 0.01;
    table[0b0010] -= 0.01;
    auto perturbed = ChannelStateModel::explicit_joint(table);
    auto report = audit_isomorphism_invariance(perturbed, g);
    CHECK_FALSE(report.pass);
    CHECK(report.max_diff >= 0.01);
}

TEST_CASE("MRF requires equal-size maximal cliques and a full potential table") {
    auto path = ConflictGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {1, 3}});  // K3 plus an edge
    CHECK_THROWS_AS(joint_prob(ChannelStateModel::mrf({1, 1, 1}), path, uint32_t{0}),
                    invalid_params);
    auto c4 = ConflictGraph::cycle(4);
    CHECK_THROWS_AS(joint_prob(ChannelStateModel::mrf({1, 1}), c4, uint32_t{0}), invalid_params);
    CHECK_THROWS_AS(ChannelStateModel::mrf({0.5, 0.0, 1.0}), invalid_params);
}

TEST_CASE("sampling frequencies match the joint") {
    auto g = ConflictGraph::cycle(4);
    auto model = ChannelStateModel::mrf({0.8, 0.2, 1.0});
    auto table = joint_table(model, g);
    std::mt19937_64 rng(21);
    const int n_draws = 40000;
    std::vector<int> counts(table.size(), 0);
    for (int it = 0; it < n_draws; ++it) {
        auto states = sample_states(model, g, rng);
        uint32_t mask = 0;
        for (int i = 0; i < 4; ++i)
            if (states[i]) mask |= 1u << i;
        ++counts[mask];
    }
    for (size_t m = 0; m < table.size(); ++m) {
        double freq = static_cast<double>(counts[m]) / n_draws;
        double sigma = std::sqrt(table[m] * (1 - table[m]) / n_draws);
        CHECK(std::abs(freq - table[m]) <= 4 * sigma + 1e-12);
    }
}

TEST_CASE("same-everywhere sampling") {
    auto g = ConflictGraph::empty(3);
    auto model = ChannelStateModel::same_everywhere({0.2, 0.3});
    std::mt19937_64 rng(5);
    std::vector<int> counts(3, 0);
    const int n_draws = 30000;
    for (int it = 0; it < n_draws; ++it) {
        auto states = sample_states(model, g, rng);
        CHECK(states[0] == states[1]);
        CHECK(states[1] == states[2]);
        ++counts[states[0]];
    }
    std::vector<double> expect{0.5, 0.2, 0.3};
    for (int j = 0; j < 3; ++j) {
        double freq = static_cast<double>(counts[j]) / n_draws;
        double sigma = std::sqrt(expect[j] * (1 - expect[j]) / n_draws);
        CHECK(std::abs(freq - expect[j]) <= 4 * sigma);
    }
    CHECK_THROWS_AS(ChannelStateModel::same_everywhere({0.6, 0.6}), invalid_params);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(ChannelStateModel::iid(1.5), invalid_params);
    CHECK_THROWS_AS(ChannelStateModel::sampled_iid(0.5, -0.1), invalid_params);
    CHECK_THROWS_AS(ChannelStateModel::explicit_joint({0.5, 0.4}), invalid_params);
    CHECK(ChannelStateModel::sampled_iid(0.5, 0.5).availability() == doctest::Approx(0.25));
    CHECK_THROWS_AS(ChannelStateModel::mrf({1, 2, 3}).availability(), invalid_params);
}
