#pragma once

#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

#include "oligo/graph.hpp"
#include "oligo/market.hpp"
#include "oligo/mean_valid.hpp"
#include "oligo/spsym.hpp"
#include "oligo/state_model.hpp"

namespace oligo {

// One seller's realized round: which nodes it offered, at what penalties, and
// what sold. `states` is the per-node channel state of this seller.
struct AuctionOutcome {
    std::vector<int> states;
    std::vector<int> offered_nodes;
    std::vector<double> penalties;  // parallel to offered_nodes
    std::vector<char> sold;         // parallel to offered_nodes
    double payoff = 0;
};

// Market-wide equilibrium profile for the network-wide-state setting.
struct MeanValidProfile {
    Partition partition;
    MeanValidEquilibrium eq;
    SameStateModel model;
    MarketParams params;
    PenaltyFamily family;
};

// Profile for the binary setting: uniform maximum-set selection plus the
// per-node pricing induced by the exact offer probabilities.
struct BinaryProfile {
    ChannelStateModel model;
    MarketParams params;
    PenaltyFamily family;
    std::vector<double> alpha;
    std::vector<PricingSolution> node_pricing;
};

BinaryProfile make_spsym_profile(const ChannelStateModel& model, const ConflictGraph& g,
                                 const MarketParams& params, const PenaltyFamily& family);

std::vector<AuctionOutcome> run_round(const MeanValidProfile& profile, const ConflictGraph& g,
                                      std::mt19937_64& rng);
std::vector<AuctionOutcome> run_round(const BinaryProfile& profile, const ConflictGraph& g,
                                      std::mt19937_64& rng);

struct PayoffEstimate {
    double mean = 0;
    double stderr_mean = 0;
    double analytic = 0;
    int rounds = 0;
};

// Mean per-seller payoff over simulated rounds vs the closed-form value.
PayoffEstimate estimate_ne_payoff(const MeanValidProfile& profile, const ConflictGraph& g,
                                  int rounds, std::mt19937_64& rng);
PayoffEstimate estimate_ne_payoff(const BinaryProfile& profile, const ConflictGraph& g,
                                  int rounds, std::mt19937_64& rng);

// Exact per-realization welfare maximum when sellers collude: everyone prices
// at the cap and set choices are optimized jointly under the per-node demand
// cap. Same-state realizations are memoized by their per-state seller counts.
class CollusionOptimizer {
  public:
    CollusionOptimizer(const ConflictGraph& g, const MarketParams& params,
                       const PenaltyFamily& family);

    // states[i] in 0..n: seller i's network-wide state (0 = inactive).
    double optimum_same_state(const std::vector<int>& seller_states);
    // masks[i]: seller i's availability mask (single-state setting).
    double optimum_binary(const std::vector<uint32_t>& masks);

  private:
    double solve(const std::vector<double>& values,
                 const std::vector<const std::vector<std::vector<int>>*>& choices);

    ConflictGraph g_;
    MarketParams params_;
    PenaltyFamily family_;
    int demand_cap_;
    std::vector<std::vector<int>> maximal_sets_;
    std::unordered_map<std::string, double> same_state_cache_;
    std::unordered_map<uint32_t, std::vector<std::vector<int>>> restricted_sets_cache_;
};

struct EfficiencyPoint {
    int m = 0;
    double ne_welfare = 0, ne_stderr = 0;
    double r_opt = 0, r_opt_stderr = 0;
    double eta = 0, eta_stderr = 0;
};

// Paired NE-vs-collusion welfare over common realizations, one point per
// demand level.
std::vector<EfficiencyPoint> efficiency_curve(const std::vector<int>& m_list,
                                              const ConflictGraph& g, const Partition& partition,
                                              const SameStateModel& model, MarketParams base,
                                              const PenaltyFamily& family, int rounds,
                                              std::mt19937_64& rng);

}  // namespace oligo
