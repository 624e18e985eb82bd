#include "oligo/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "oligo/rng.hpp"

namespace oligo {

namespace {

struct Offer {
    int seller;
    int state;
    double penalty;
    int slot;  // index into the seller's outcome arrays
};

int draw_state(const SameStateModel& model, std::mt19937_64& rng) {
    double u = uniform01(rng);
    double acc = 0;
    for (size_t j = 0; j < model.q.size(); ++j) {
        acc += model.q[j];
        if (u < acc) return static_cast<int>(j) + 1;
    }
    return 0;
}

int draw_demand(const MarketParams& params, std::mt19937_64& rng) {
    if (params.demand.is_fixed()) return params.demand.fixed_m();
    return sample_weighted(rng, params.demand.kappa) + 1;
}

// Sells the min(demand, offers) cheapest offers at each node; ties straddling
// the cut are broken uniformly. Credits f_state(penalty) - c to the winning
// sellers and returns total welfare.
double allocate(const ConflictGraph& g, const MarketParams& params, const PenaltyFamily& family,
                std::vector<std::vector<Offer>>& node_offers, std::mt19937_64& rng,
                std::vector<double>& seller_payoff, std::vector<AuctionOutcome>* outcomes) {
    double welfare = 0;
    for (int a = 0; a < g.n_nodes; ++a) {
        auto& offers = node_offers[a];
        if (offers.empty()) continue;
        const int m = draw_demand(params, rng);
        int k = std::min<int>(m, static_cast<int>(offers.size()));
        std::sort(offers.begin(), offers.end(), [](const Offer& x, const Offer& y) {
            return x.penalty != y.penalty ? x.penalty < y.penalty : x.seller < y.seller;
        });
        if (k < static_cast<int>(offers.size()) && offers[k - 1].penalty == offers[k].penalty) {
            // shuffle the run of equal penalties across the cut
            int lo = k - 1, hi = k + 1;
            while (lo > 0 && offers[lo - 1].penalty == offers[k - 1].penalty) --lo;
            while (hi < static_cast<int>(offers.size()) && offers[hi].penalty == offers[k].penalty)
                ++hi;
            for (int i = hi - 1; i > lo; --i)
                std::swap(offers[i], offers[lo + uniform_below(rng, i - lo + 1)]);
        }
        for (int i = 0; i < k; ++i) {
            const Offer& o = offers[i];
            double gain = family.f(o.penalty, o.state) - params.c;
            seller_payoff[o.seller] += gain;
            welfare += gain;
            if (outcomes) (*outcomes)[o.seller].sold[o.slot] = 1;
        }
    }
    return welfare;
}

// One round of the network-wide-state market with pre-drawn seller states.
double mean_valid_round(const MeanValidProfile& profile, const ConflictGraph& g,
                        const std::vector<int>& seller_states, std::mt19937_64& rng,
                        std::vector<double>& seller_payoff, std::vector<AuctionOutcome>* outcomes) {
    const int l = profile.params.l;
    std::vector<std::vector<Offer>> node_offers(g.n_nodes);
    seller_payoff.assign(l, 0.0);
    for (int i = 0; i < l; ++i) {
        const int j = seller_states[i];
        if (outcomes) (*outcomes)[i].states.assign(g.n_nodes, j);
        if (j == 0) continue;
        int s = sample_weighted(rng, profile.eq.t[j - 1]);
        if (s < 0) continue;
        const auto& set = profile.partition.sets[s];
        for (int a : set) {
            double x = sample_penalty(j, profile.eq.pricing[s], profile.eq.alpha[s],
                                      profile.params, profile.family, uniform01(rng));
            int slot = 0;
            if (outcomes) {
                auto& out = (*outcomes)[i];
                slot = static_cast<int>(out.offered_nodes.size());
                out.offered_nodes.push_back(a);
                out.penalties.push_back(x);
                out.sold.push_back(0);
            }
            node_offers[a].push_back({i, j, x, slot});
        }
    }
    double welfare =
        allocate(g, profile.params, profile.family, node_offers, rng, seller_payoff, outcomes);
    if (outcomes)
        for (int i = 0; i < l; ++i) (*outcomes)[i].payoff = seller_payoff[i];
    return welfare;
}

double binary_round(const BinaryProfile& profile, const ConflictGraph& g, std::mt19937_64& rng,
                    std::vector<double>& seller_payoff, std::vector<AuctionOutcome>* outcomes) {
    const int l = profile.params.l;
    std::vector<std::vector<Offer>> node_offers(g.n_nodes);
    seller_payoff.assign(l, 0.0);
    for (int i = 0; i < l; ++i) {
        auto states = sample_states(profile.model, g, rng);
        if (outcomes) (*outcomes)[i].states = states;
        ConflictGraph sub = restrict_graph(g, states);
        if (sub.n_nodes == 0) continue;
        for (int a : spsym_select(sub, rng)) {
            double x = sample_penalty(1, profile.node_pricing[a], {profile.alpha[a]},
                                      profile.params, profile.family, uniform01(rng));
            int slot = 0;
            if (outcomes) {
                auto& out = (*outcomes)[i];
                slot = static_cast<int>(out.offered_nodes.size());
                out.offered_nodes.push_back(a);
                out.penalties.push_back(x);
                out.sold.push_back(0);
            }
            node_offers[a].push_back({i, 1, x, slot});
        }
    }
    double welfare =
        allocate(g, profile.params, profile.family, node_offers, rng, seller_payoff, outcomes);
    if (outcomes)
        for (int i = 0; i < l; ++i) (*outcomes)[i].payoff = seller_payoff[i];
    return welfare;
}

PayoffEstimate summarize(double sum, double sum_sq, int rounds, double analytic) {
    PayoffEstimate est;
    est.rounds = rounds;
    est.mean = sum / rounds;
    double var = std::max(0.0, sum_sq / rounds - est.mean * est.mean);
    est.stderr_mean = std::sqrt(var / rounds);
    est.analytic = analytic;
    return est;
}

}  // namespace

BinaryProfile make_spsym_profile(const ChannelStateModel& model, const ConflictGraph& g,
                                 const MarketParams& params, const PenaltyFamily& family) {
    if (params.n != 1) throw invalid_params("set-selection profiles need a single-state market");
    validate_market(params, family);
    BinaryProfile profile;
    profile.model = model;
    profile.params = params;
    profile.family = family;
    profile.alpha = node_offer_profile(SetSelectionStrategy::spsym(), model, g);
    profile.node_pricing.reserve(g.n_nodes);
    for (int a = 0; a < g.n_nodes; ++a)
        profile.node_pricing.push_back(solve_single_location(params, family, {profile.alpha[a]}));
    return profile;
}

std::vector<AuctionOutcome> run_round(const MeanValidProfile& profile, const ConflictGraph& g,
                                      std::mt19937_64& rng) {
    std::vector<AuctionOutcome> outcomes(profile.params.l);
    std::vector<int> states(profile.params.l);
    for (auto& j : states) j = draw_state(profile.model, rng);
    std::vector<double> payoff;
    mean_valid_round(profile, g, states, rng, payoff, &outcomes);
    return outcomes;
}

std::vector<AuctionOutcome> run_round(const BinaryProfile& profile, const ConflictGraph& g,
                                      std::mt19937_64& rng) {
    std::vector<AuctionOutcome> outcomes(profile.params.l);
    std::vector<double> payoff;
    binary_round(profile, g, rng, payoff, &outcomes);
    return outcomes;
}

PayoffEstimate estimate_ne_payoff(const MeanValidProfile& profile, const ConflictGraph& g,
                                  int rounds, std::mt19937_64& rng) {
    if (rounds < 1) throw invalid_params("need at least one round");
    double sum = 0, sum_sq = 0;
    std::vector<int> states(profile.params.l);
    std::vector<double> payoff;
    for (int it = 0; it < rounds; ++it) {
        for (auto& j : states) j = draw_state(profile.model, rng);
        mean_valid_round(profile, g, states, rng, payoff, nullptr);
        sum += payoff[0];
        sum_sq += payoff[0] * payoff[0];
    }
    double analytic = 0;
    for (int j = 1; j <= profile.eq.n_states(); ++j)
        analytic += profile.model.q[j - 1] * profile.eq.payoff[j - 1];
    return summarize(sum, sum_sq, rounds, analytic);
}

PayoffEstimate estimate_ne_payoff(const BinaryProfile& profile, const ConflictGraph& g, int rounds,
                                  std::mt19937_64& rng) {
    if (rounds < 1) throw invalid_params("need at least one round");
    double sum = 0, sum_sq = 0;
    std::vector<double> payoff;
    for (int it = 0; it < rounds; ++it) {
        binary_round(profile, g, rng, payoff, nullptr);
        sum += payoff[0];
        sum_sq += payoff[0] * payoff[0];
    }
    double analytic = 0;
    for (int a = 0; a < g.n_nodes; ++a)
        analytic += profile.alpha[a] * (profile.node_pricing[a].p[0] - profile.params.c);
    return summarize(sum, sum_sq, rounds, analytic);
}

CollusionOptimizer::CollusionOptimizer(const ConflictGraph& g, const MarketParams& params,
                                       const PenaltyFamily& family)
    : g_(g), params_(params), family_(family) {
    if (!params.demand.is_fixed())
        throw invalid_params("collusion optimum implemented for fixed demand");
    if (g.n_nodes > 16) throw cap_exceeded("collusion optimum limited to 16 nodes");
    validate_market(params, family);
    demand_cap_ = std::min(params.demand.fixed_m(), 15);
    maximal_sets_ = independent_sets(g, ISMode::Maximal);
}

// Exact joint welfare maximum: sellers are processed in descending value
// order, so crediting a sale whenever a node is below its demand cap is
// optimal (a later, cheaper seller can never displace an earlier one). The
// memo key packs per-node sale counts, 4 bits each, capped at the demand.
double CollusionOptimizer::solve(
    const std::vector<double>& values,
    const std::vector<const std::vector<std::vector<int>>*>& choices) {
    const int depth = static_cast<int>(values.size());
    std::vector<std::unordered_map<uint64_t, double>> memo(depth);
    std::function<double(int, uint64_t)> rec = [&](int i, uint64_t counts) -> double {
        if (i == depth) return 0.0;
        auto& level = memo[i];
        auto it = level.find(counts);
        if (it != level.end()) return it->second;
        double best = 0;
        for (const auto& set : *choices[i]) {
            double gain = 0;
            uint64_t next = counts;
            for (int a : set) {
                uint64_t cnt = (counts >> (4 * a)) & 0xFu;
                if (static_cast<int>(cnt) < demand_cap_) {
                    gain += values[i];
                    next += uint64_t(1) << (4 * a);
                }
            }
            best = std::max(best, gain + rec(i + 1, next));
        }
        level.emplace(counts, best);
        return best;
    };
    return rec(0, 0);
}

double CollusionOptimizer::optimum_same_state(const std::vector<int>& seller_states) {
    std::vector<int> counts(params_.n + 1, 0);
    for (int j : seller_states) {
        if (j < 0 || j > params_.n) throw invalid_params("seller state out of range");
        ++counts[j];
    }
    std::string key;
    for (int c : counts) key += std::to_string(c) + ",";
    auto it = same_state_cache_.find(key);
    if (it != same_state_cache_.end()) return it->second;

    std::vector<double> values;
    std::vector<const std::vector<std::vector<int>>*> choices;
    for (int j = params_.n; j >= 1; --j)
        for (int r = 0; r < counts[j]; ++r) {
            values.push_back(family_.f(params_.v, j) - params_.c);
            choices.push_back(&maximal_sets_);
        }
    double best = solve(values, choices);
    same_state_cache_.emplace(std::move(key), best);
    return best;
}

double CollusionOptimizer::optimum_binary(const std::vector<uint32_t>& masks) {
    if (params_.n != 1) throw invalid_params("binary optimum needs a single-state market");
    std::vector<double> values;
    std::vector<const std::vector<std::vector<int>>*> choices;
    const double value = family_.f(params_.v, 1) - params_.c;
    for (uint32_t mask : masks) {
        if (mask == 0) continue;
        auto it = restricted_sets_cache_.find(mask);
        if (it == restricted_sets_cache_.end()) {
            ConflictGraph sub = restrict_graph(g_, mask);
            std::vector<std::vector<int>> sets;
            for (const auto& set : independent_sets(sub, ISMode::Maximal)) {
                std::vector<int> labeled;
                for (int v : set) labeled.push_back(sub.label[v]);
                sets.push_back(std::move(labeled));
            }
            it = restricted_sets_cache_.emplace(mask, std::move(sets)).first;
        }
        values.push_back(value);
        choices.push_back(&it->second);
    }
    if (values.empty()) return 0.0;
    return solve(values, choices);
}

std::vector<EfficiencyPoint> efficiency_curve(const std::vector<int>& m_list,
                                              const ConflictGraph& g, const Partition& partition,
                                              const SameStateModel& model, MarketParams base,
                                              const PenaltyFamily& family, int rounds,
                                              std::mt19937_64& rng) {
    if (rounds < 1) throw invalid_params("need at least one round");
    std::vector<EfficiencyPoint> curve;
    for (int m : m_list) {
        MarketParams params = base;
        params.demand = DemandModel::fixed_demand(m);
        MeanValidProfile profile{partition, {}, model, params, family};
        profile.eq = solve_mean_valid(partition.cardinalities(), model, params, family);
        CollusionOptimizer optimizer(g, params, family);

        double sum_ne = 0, sum_ne_sq = 0, sum_opt = 0, sum_opt_sq = 0, sum_cross = 0;
        std::vector<int> states(params.l);
        std::vector<double> payoff;
        for (int it = 0; it < rounds; ++it) {
            for (auto& j : states) j = draw_state(model, rng);
            double ne = mean_valid_round(profile, g, states, rng, payoff, nullptr);
            double opt = optimizer.optimum_same_state(states);
            sum_ne += ne;
            sum_ne_sq += ne * ne;
            sum_opt += opt;
            sum_opt_sq += opt * opt;
            sum_cross += ne * opt;
        }
        EfficiencyPoint point;
        point.m = m;
        point.ne_welfare = sum_ne / rounds;
        point.r_opt = sum_opt / rounds;
        point.ne_stderr =
            std::sqrt(std::max(0.0, sum_ne_sq / rounds - point.ne_welfare * point.ne_welfare) /
                      rounds);
        point.r_opt_stderr = std::sqrt(
            std::max(0.0, sum_opt_sq / rounds - point.r_opt * point.r_opt) / rounds);
        if (sum_opt > 0) {
            point.eta = sum_ne / sum_opt;
            // ratio-estimator standard error via the linearized residuals
            double resid_sq = sum_ne_sq - 2 * point.eta * sum_cross + point.eta * point.eta * sum_opt_sq;
            point.eta_stderr =
                std::sqrt(std::max(0.0, resid_sq / rounds) / rounds) / point.r_opt;
        } else {
            point.eta = 1.0;
        }
        curve.push_back(point);
    }
    return curve;
}

}  // namespace oligo
