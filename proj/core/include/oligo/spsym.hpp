#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oligo/graph.hpp"
#include "oligo/market.hpp"
#include "oligo/state_model.hpp"

namespace oligo {

// Set-selection strategies for the single-state setting. SPsym picks a
// maximum independent set of the available subgraph uniformly (independently
// per connected component). LineFamily is the parametrized family on the
// 4-node path: odd components take their unique maximum set; even components
// mix as (r, 1-r), (r1, 1-r1), (1/2, 1/2) or (0.75+r, 0.25-r) depending on
// where they start, under the constraint 2r + r1 = 0.75, 0 <= r <= 0.25.
struct SetSelectionStrategy {
    enum class Kind { SPsym, LineFamily };
    Kind kind = Kind::SPsym;
    double r = 0, r1 = 0;

    static SetSelectionStrategy spsym() { return {}; }
    static SetSelectionStrategy line_family(double r, double r1);
};

// Uniform draw over maximum independent sets of a (restricted) graph,
// factored per component. Returns original node labels.
std::vector<int> spsym_select(const ConflictGraph& g_restricted, std::mt19937_64& rng);

// Exact per-node offer probabilities alpha_a under the strategy: probability
// a given seller offers its channel at node a. Enumerates the joint over
// availability masks (N <= kJointEnumCap).
std::vector<double> node_offer_profile(const SetSelectionStrategy& strategy,
                                       const ChannelStateModel& model, const ConflictGraph& g);

// P(the run of available nodes starting exactly at `start` has length `len`)
// on a path of n_nodes IID-available nodes; `start` is 1-based.
double segment_probability(int start, int len, int n_nodes, double q);

struct SelectionAuditReport {
    bool pass = false;
    std::string detail;
    std::vector<double> alpha;
    double alpha_spread = 0;
    // witness: availability mask plus the profitable deviation set
    std::optional<uint32_t> witness_mask;
    std::vector<int> witness_set;
    double witness_gain = 0;
};

// Checks whether the strategy is a best response to itself: for every
// reachable availability mask, no maximal independent set earns more than the
// strategy's own expected payoff (per-node payoffs are pinned by alpha).
SelectionAuditReport selection_ne_audit(const SetSelectionStrategy& strategy,
                                        const ChannelStateModel& model, const ConflictGraph& g,
                                        const MarketParams& params, const PenaltyFamily& family);

struct LineFamilyReport {
    bool ne_confirmed = false;
    std::string detail;
    std::vector<double> alpha;
    double alpha_spread = 0;
};

// Validates the constraint, the segment-probability identities, and the NE
// property for the 4-node path family.
LineFamilyReport line_family_audit(double r, double r1, double q, const MarketParams& params,
                                   const PenaltyFamily& family);

struct ComponentStatsReport {
    double mean_component_size = 0;  // component containing a random available node
    double stderr_component = 0;
    double mean_largest = 0;
    double stderr_largest = 0;
    double bound = 0;  // 1/(1 - availability * max_degree), infinity otherwise
    bool bound_finite = false;
    int samples = 0;
};

ComponentStatsReport component_stats(const ChannelStateModel& model, const ConflictGraph& g,
                                     int samples, std::mt19937_64& rng);

}  // namespace oligo
