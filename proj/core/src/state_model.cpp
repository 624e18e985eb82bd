#include "oligo/state_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "oligo/market.hpp"
#include "oligo/rng.hpp"

namespace oligo {

ChannelStateModel ChannelStateModel::same_everywhere(std::vector<double> q) {
    ChannelStateModel m;
    m.kind = Kind::SameEverywhere;
    m.q = std::move(q);
    double total = 0;
    for (double x : m.q) {
        if (x < 0 || x > 1) throw invalid_params("state probability outside [0,1]");
        total += x;
    }
    if (total > 1 + 1e-12) throw invalid_params("state probabilities exceed 1");
    return m;
}

ChannelStateModel ChannelStateModel::iid(double q) {
    if (q < 0 || q > 1) throw invalid_params("availability outside [0,1]");
    ChannelStateModel m;
    m.kind = Kind::IID;
    m.q = {q};
    return m;
}

ChannelStateModel ChannelStateModel::sampled_iid(double q, double p) {
    if (q < 0 || q > 1 || p < 0 || p > 1) throw invalid_params("probability outside [0,1]");
    ChannelStateModel m;
    m.kind = Kind::SampledIID;
    m.q = {q};
    m.p = p;
    return m;
}

ChannelStateModel ChannelStateModel::mrf(std::vector<double> zeta) {
    ChannelStateModel m;
    m.kind = Kind::MRF;
    m.zeta = std::move(zeta);
    for (double z : m.zeta)
        if (z <= 0) throw invalid_params("potentials must be strictly positive");
    return m;
}

ChannelStateModel ChannelStateModel::explicit_joint(std::vector<double> probs) {
    ChannelStateModel m;
    m.kind = Kind::ExplicitJoint;
    m.joint = std::move(probs);
    double total = 0;
    for (double x : m.joint) {
        if (x < 0) throw invalid_params("negative probability");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-10) throw invalid_params("joint does not sum to 1");
    return m;
}

double ChannelStateModel::availability() const {
    switch (kind) {
        case Kind::IID: return q[0];
        case Kind::SampledIID: return p * q[0];
        default: throw invalid_params("availability defined only for IID-style models");
    }
}

namespace {

double mrf_unnormalized(const ChannelStateModel& model, const std::vector<std::vector<int>>& cliques,
                        uint32_t mask) {
    double value = 1.0;
    for (const auto& c : cliques) {
        int ones = 0;
        for (int v : c) ones += (mask >> v) & 1u;
        value *= model.zeta[ones];
    }
    return value;
}

std::vector<std::vector<int>> mrf_cliques(const ChannelStateModel& model, const ConflictGraph& g) {
    auto cliques = maximal_cliques(g);
    if (cliques.empty()) throw invalid_params("MRF needs at least one clique");
    size_t size = cliques.front().size();
    for (const auto& c : cliques)
        if (c.size() != size)
            throw invalid_params("symmetric MRF requires equal-size maximal cliques");
    if (model.zeta.size() != size + 1)
        throw invalid_params("potential table must have clique-size + 1 entries");
    return cliques;
}

}  // namespace

double joint_prob(const ChannelStateModel& model, const ConflictGraph& g, uint32_t mask) {
    const int n = g.n_nodes;
    switch (model.kind) {
        case ChannelStateModel::Kind::IID:
        case ChannelStateModel::Kind::SampledIID: {
            const double a = model.availability();
            const int ones = std::popcount(mask);
            return std::pow(a, ones) * std::pow(1.0 - a, n - ones);
        }
        case ChannelStateModel::Kind::ExplicitJoint:
            return model.joint.at(mask);
        case ChannelStateModel::Kind::MRF: {
            if (n > kJointEnumCap) throw cap_exceeded("MRF normalization cap exceeded");
            auto cliques = mrf_cliques(model, g);
            double z = 0;
            for (uint32_t m = 0; m < (1u << n); ++m) z += mrf_unnormalized(model, cliques, m);
            return mrf_unnormalized(model, cliques, mask) / z;
        }
        default:
            throw invalid_params("joint_prob needs a binary state model");
    }
}

double joint_prob(const ChannelStateModel& model, const ConflictGraph& g,
                  const std::vector<int>& states) {
    if (static_cast<int>(states.size()) != g.n_nodes) throw invalid_params("state vector length mismatch");
    uint32_t mask = 0;
    for (int i = 0; i < g.n_nodes; ++i)
        if (states[i] >= 1) mask |= 1u << i;
    return joint_prob(model, g, mask);
}

std::vector<double> joint_table(const ChannelStateModel& model, const ConflictGraph& g) {
    const int n = g.n_nodes;
    if (n > kJointEnumCap) throw cap_exceeded("joint enumeration cap exceeded");
    std::vector<double> table(1u << n);
    if (model.kind == ChannelStateModel::Kind::MRF) {
        auto cliques = mrf_cliques(model, g);
        double z = 0;
        for (uint32_t m = 0; m < table.size(); ++m) {
            table[m] = mrf_unnormalized(model, cliques, m);
            z += table[m];
        }
        for (auto& x : table) x /= z;
        return table;
    }
    for (uint32_t m = 0; m < table.size(); ++m) table[m] = joint_prob(model, g, m);
    return table;
}

std::vector<int> sample_states(const ChannelStateModel& model, const ConflictGraph& g,
                               std::mt19937_64& rng) {
    const int n = g.n_nodes;
    std::vector<int> states(n, 0);
    switch (model.kind) {
        case ChannelStateModel::Kind::SameEverywhere: {
            double u = uniform01(rng);
            double acc = 0;
            int state = 0;
            for (size_t j = 0; j < model.q.size(); ++j) {
                acc += model.q[j];
                if (u < acc) {
                    state = static_cast<int>(j) + 1;
                    break;
                }
            }
            std::fill(states.begin(), states.end(), state);
            return states;
        }
        case ChannelStateModel::Kind::IID:
        case ChannelStateModel::Kind::SampledIID: {
            const double a = model.availability();
            for (int i = 0; i < n; ++i)
                if (uniform01(rng) < a) states[i] = 1;
            return states;
        }
        case ChannelStateModel::Kind::MRF:
        case ChannelStateModel::Kind::ExplicitJoint: {
            auto table = model.kind == ChannelStateModel::Kind::ExplicitJoint
                             ? model.joint
                             : joint_table(model, g);
            double u = uniform01(rng);
            double acc = 0;
            uint32_t chosen = static_cast<uint32_t>(table.size()) - 1;
            for (uint32_t m = 0; m < table.size(); ++m) {
                acc += table[m];
                if (u < acc) {
                    chosen = m;
                    break;
                }
            }
            for (int i = 0; i < n; ++i)
                if (chosen >> i & 1u) states[i] = 1;
            return states;
        }
    }
    throw invalid_params("unreachable");
}

InvarianceReport audit_isomorphism_invariance(const ChannelStateModel& model,
                                              const ConflictGraph& g) {
    InvarianceReport report;
    const int n = g.n_nodes;
    if (n > kSymmetryCap) throw cap_exceeded("invariance audit cap exceeded");
    auto table = joint_table(model, g);

    // Group masks by cheap invariants, then compare isomorphic pairs.
    struct Entry {
        uint32_t mask;
        ConflictGraph sub;
    };
    std::vector<std::pair<std::vector<int>, std::vector<Entry>>> groups;
    for (uint32_t m = 0; m < table.size(); ++m) {
        ConflictGraph sub = restrict_graph(g, m);
        std::vector<int> key{sub.n_nodes, sub.edge_count()};
        std::vector<int> degs;
        for (int v = 0; v < sub.n_nodes; ++v) degs.push_back(sub.degree(v));
        std::sort(degs.begin(), degs.end());
        key.insert(key.end(), degs.begin(), degs.end());
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& gr) { return gr.first == key; });
        if (it == groups.end()) {
            groups.push_back({key, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back({m, std::move(sub)});
    }
    report.pass = true;
    for (const auto& [key, entries] : groups) {
        for (size_t i = 0; i < entries.size(); ++i)
            for (size_t j = i + 1; j < entries.size(); ++j) {
                if (!are_isomorphic(entries[i].sub, entries[j].sub)) continue;
                double diff = std::abs(table[entries[i].mask] - table[entries[j].mask]);
                report.max_diff = std::max(report.max_diff, diff);
                if (diff >= 1e-10 && report.pass) {
                    report.pass = false;
                    report.detail = "isomorphic states " + std::to_string(entries[i].mask) + " and " +
                                    std::to_string(entries[j].mask) + " differ by " +
                                    std::to_string(diff);
                }
            }
    }

    // Clique-membership profile: how many maximal cliques contain each clique
    // of a given size; uniformity is the structural condition that makes
    // clique-factored symmetric potentials isomorphism-invariant.
    auto maxcl = maximal_cliques(g);
    size_t max_size = 0;
    for (const auto& c : maxcl) max_size = std::max(max_size, c.size());
    report.r_uniform = true;
    for (size_t size = 1; size <= max_size; ++size) {
        // enumerate cliques of this size
        std::vector<std::vector<int>> cliques;
        std::vector<int> cur;
        std::function<void(int)> rec = [&](int start) {
            if (cur.size() == size) {
                cliques.push_back(cur);
                return;
            }
            for (int v = start; v < n; ++v) {
                bool ok = true;
                for (int u : cur)
                    if (!g.adjacent(u, v)) {
                        ok = false;
                        break;
                    }
                if (ok) {
                    cur.push_back(v);
                    rec(v + 1);
                    cur.pop_back();
                }
            }
        };
        rec(0);
        int r = -1;
        for (const auto& c : cliques) {
            int count = 0;
            for (const auto& mc : maxcl)
                if (std::includes(mc.begin(), mc.end(), c.begin(), c.end())) ++count;
            if (r == -1)
                r = count;
            else if (r != count)
                report.r_uniform = false;
        }
        report.r_profile.push_back(r);
    }
    return report;
}

}  // namespace oligo
