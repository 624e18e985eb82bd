#pragma once

#include <random>
#include <string>
#include <vector>

#include "oligo/graph.hpp"

namespace oligo {

inline constexpr int kJointEnumCap = 16;  // exact joints enumerate 2^N vectors

// Joint distribution over per-node channel states. All variants except
// SameEverywhere are binary (n = 1): a node is available or not.
struct ChannelStateModel {
    enum class Kind { SameEverywhere, IID, SampledIID, MRF, ExplicitJoint };
    Kind kind = Kind::IID;
    std::vector<double> q;      // SameEverywhere: per-state; IID/SampledIID: q[0]
    double p = 1.0;             // SampledIID estimation probability
    std::vector<double> zeta;   // MRF potential, indexed by count of available
                                // nodes in a maximal clique
    std::vector<double> joint;  // ExplicitJoint: size 2^N, mask-indexed

    static ChannelStateModel same_everywhere(std::vector<double> q);
    static ChannelStateModel iid(double q);
    static ChannelStateModel sampled_iid(double q, double p);
    static ChannelStateModel mrf(std::vector<double> zeta);
    static ChannelStateModel explicit_joint(std::vector<double> probs);

    bool binary() const { return kind != Kind::SameEverywhere; }
    int n_states() const { return binary() ? 1 : static_cast<int>(q.size()); }
    double availability() const;  // per-node availability for binary kinds
};

// Exact probability of the availability mask (binary models only).
double joint_prob(const ChannelStateModel& model, const ConflictGraph& g, uint32_t mask);
double joint_prob(const ChannelStateModel& model, const ConflictGraph& g,
                  const std::vector<int>& states);

// Full table over 2^N masks; requires N <= kJointEnumCap.
std::vector<double> joint_table(const ChannelStateModel& model, const ConflictGraph& g);

// One state vector draw.
std::vector<int> sample_states(const ChannelStateModel& model, const ConflictGraph& g,
                               std::mt19937_64& rng);

struct InvarianceReport {
    bool pass = false;
    std::string detail;
    double max_diff = 0;
    // #maximal cliques containing a clique of each size; empty entry when the
    // count varies (reported alongside whether it is uniform).
    std::vector<int> r_profile;
    bool r_uniform = false;
};

// Checks that isomorphic restricted graphs carry identical probability, as
// the symmetric-strategy equilibrium requires.
InvarianceReport audit_isomorphism_invariance(const ChannelStateModel& model,
                                              const ConflictGraph& g);

}  // namespace oligo
