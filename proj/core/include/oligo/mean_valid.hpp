#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oligo/graph.hpp"
#include "oligo/market.hpp"

namespace oligo {

// Network-wide channel state: state j with probability q_j, 0 otherwise.
struct SameStateModel {
    std::vector<double> q;  // q[j-1] = P(state j), sum < 1
    void validate(int n) const;
};

// Symmetric equilibrium over a partition with cardinalities M_1 >= ... >= M_d:
// at state j a seller picks set I_s with probability t_{s,j} and prices each
// node of I_s from the per-set pricing chain.
struct MeanValidEquilibrium {
    std::vector<int> M;
    std::vector<std::vector<double>> t;      // t[j-1][s-1]
    std::vector<std::vector<double>> gamma;  // gamma[j-1][s-1] = sum_{k>=j} t_{s,k} q_k
    std::vector<int> d;                      // d[j-1] = max s with t_{s,j} > 0
    std::vector<double> payoff;              // per-state total payoff of a conforming seller
    std::vector<PricingSolution> pricing;    // pricing[s-1]: chain for set s
    std::vector<std::vector<double>> alpha;  // alpha[s-1][j-1] = q_j t_{s,j}
    bool degenerate = false;

    int n_states() const { return static_cast<int>(t.size()); }
    int n_sets() const { return static_cast<int>(M.size()); }
};

// Constructive solve: downward recursion over states; at each state the
// common payoff level is found by bisection (the total selection mass is
// strictly decreasing in the level). `split` sets the bracketing midpoint
// ratio so two runs with different values can cross-check uniqueness.
MeanValidEquilibrium solve_mean_valid(const std::vector<int>& M, const SameStateModel& model,
                                      const MarketParams& params, const PenaltyFamily& family,
                                      double split = 0.5);

// Rebuild pricing/payoffs for an arbitrary (possibly off-equilibrium)
// selection matrix t[j-1][s-1]; used by the deviation audits.
MeanValidEquilibrium equilibrium_from_t(const std::vector<std::vector<double>>& t,
                                        const std::vector<int>& M, const SameStateModel& model,
                                        const MarketParams& params, const PenaltyFamily& family);

struct DeviationWitness {
    int state = 0;
    std::vector<int> set;
    double payoff = 0;
    double reference = 0;
};

struct BestResponseReport {
    bool pass = false;
    std::optional<DeviationWitness> witness;
    // max deviation payoff per state vs the conforming payoff
    std::vector<double> best_deviation;
    std::vector<double> conforming;
    bool partition_sets_attain = false;  // I_s, s <= d_j reach the optimum
};

// Brute-force check that no maximal independent set (with per-node optimal
// penalties) beats the conforming payoff, for each state.
BestResponseReport best_response_audit(const ConflictGraph& g, const Partition& partition,
                                       const MeanValidEquilibrium& eq, const SameStateModel& model,
                                       const MarketParams& params, const PenaltyFamily& family,
                                       int grid_points = 256);

struct PartitionEquivalenceReport {
    bool pass = false;
    std::string detail;
    double max_alpha_diff = 0;
};

// Two valid partitions of the same graph must give identical per-node offer
// probabilities, and sets of unequal cardinality must be disjoint.
PartitionEquivalenceReport partition_equivalence_audit(const ConflictGraph& g, const Partition& a,
                                                       const Partition& b,
                                                       const SameStateModel& model,
                                                       const MarketParams& params,
                                                       const PenaltyFamily& family);

}  // namespace oligo
