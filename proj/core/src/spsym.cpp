#include "oligo/spsym.hpp"

#include <algorithm>
#include <cmath>

#include "oligo/rng.hpp"

namespace oligo {

SetSelectionStrategy SetSelectionStrategy::line_family(double r, double r1) {
    if (r < 0 || r > 0.25 || r1 < 0 || std::abs(2 * r + r1 - 0.75) > 1e-12)
        throw invalid_params("line family requires 2r + r1 = 0.75 with 0 <= r <= 0.25");
    SetSelectionStrategy s;
    s.kind = Kind::LineFamily;
    s.r = r;
    s.r1 = r1;
    return s;
}

namespace {

ConflictGraph induced(const ConflictGraph& g, const std::vector<int>& nodes) {
    std::vector<int> states(g.n_nodes, 0);
    for (int v : nodes) states[v] = 1;
    return restrict_graph(g, states);
}

// Weighted choice over the sets an even path-component mixes between.
struct SetMix {
    std::vector<std::vector<int>> sets;  // original labels
    std::vector<double> probs;
};

// The mix a strategy plays on one connected component (labels are original
// node ids of the parent graph the component came from).
SetMix component_mix(const SetSelectionStrategy& strategy, const ConflictGraph& component) {
    SetMix mix;
    if (strategy.kind == SetSelectionStrategy::Kind::SPsym) {
        auto maximum = independent_sets(component, ISMode::Maximum);
        const double p = 1.0 / static_cast<double>(maximum.size());
        for (const auto& set : maximum) {
            std::vector<int> labeled;
            for (int v : set) labeled.push_back(component.label[v]);
            std::sort(labeled.begin(), labeled.end());
            mix.sets.push_back(std::move(labeled));
            mix.probs.push_back(p);
        }
        return mix;
    }
    // Line family: the component is a run of consecutive path nodes.
    std::vector<int> run(component.label);
    std::sort(run.begin(), run.end());
    const int start = run.front() + 1;  // 1-based start of the run
    const int len = static_cast<int>(run.size());
    std::vector<int> odd_set, even_set;
    for (int i = 0; i < len; ++i) (i % 2 == 0 ? odd_set : even_set).push_back(run[i]);
    if (len % 2 == 1) {
        mix.sets.push_back(odd_set);
        mix.probs.push_back(1.0);
        return mix;
    }
    double p_first;
    if (start == 1 && len == 2)
        p_first = strategy.r;
    else if (start == 1 && len == 4)
        p_first = strategy.r1;
    else if (start == 2 && len == 2)
        p_first = 0.5;
    else if (start == 3 && len == 2)
        p_first = 0.75 + strategy.r;
    else
        throw invalid_params("line family defined only on the 4-node path");
    mix.sets.push_back(odd_set);
    mix.probs.push_back(p_first);
    mix.sets.push_back(even_set);
    mix.probs.push_back(1.0 - p_first);
    return mix;
}

void require_path4(const ConflictGraph& g) {
    bool ok = g.n_nodes == 4 && g.edge_count() == 3;
    if (ok)
        for (int i = 0; i + 1 < 4 && ok; ++i) ok = g.adjacent(i, i + 1);
    if (!ok) throw invalid_params("line family defined only on the 4-node path");
}

}  // namespace

std::vector<int> spsym_select(const ConflictGraph& g_restricted, std::mt19937_64& rng) {
    std::vector<int> chosen;
    for (const auto& comp_nodes : components(g_restricted)) {
        ConflictGraph comp = induced(g_restricted, comp_nodes);
        auto maximum = independent_sets(comp, ISMode::Maximum);
        const auto& set = maximum[uniform_below(rng, static_cast<int>(maximum.size()))];
        for (int v : set) chosen.push_back(comp.label[v]);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<double> node_offer_profile(const SetSelectionStrategy& strategy,
                                       const ChannelStateModel& model, const ConflictGraph& g) {
    if (!model.binary()) throw invalid_params("set-selection strategies need a binary state model");
    if (strategy.kind == SetSelectionStrategy::Kind::LineFamily) require_path4(g);
    const int n = g.n_nodes;
    auto table = joint_table(model, g);
    std::vector<double> alpha(n, 0.0);
    for (uint32_t mask = 1; mask < table.size(); ++mask) {
        const double q_mask = table[mask];
        if (q_mask <= 0) continue;
        ConflictGraph sub = restrict_graph(g, mask);
        for (const auto& comp_nodes : components(sub)) {
            ConflictGraph comp = induced(sub, comp_nodes);
            SetMix mix = component_mix(strategy, comp);
            for (size_t i = 0; i < mix.sets.size(); ++i)
                for (int a : mix.sets[i]) alpha[a] += q_mask * mix.probs[i];
        }
    }
    return alpha;
}

double segment_probability(int start, int len, int n_nodes, double q) {
    if (start < 1 || len < 1 || start + len - 1 > n_nodes) return 0.0;
    double p = std::pow(q, len);
    if (start > 1) p *= 1.0 - q;
    if (start + len - 1 < n_nodes) p *= 1.0 - q;
    return p;
}

SelectionAuditReport selection_ne_audit(const SetSelectionStrategy& strategy,
                                        const ChannelStateModel& model, const ConflictGraph& g,
                                        const MarketParams& params, const PenaltyFamily& family) {
    if (params.n != 1) throw invalid_params("selection audit applies to single-state markets");
    validate_market(params, family);
    SelectionAuditReport report;
    report.alpha = node_offer_profile(strategy, model, g);

    double lo = report.alpha[0], hi = report.alpha[0];
    for (double a : report.alpha) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    report.alpha_spread = hi - lo;

    // Per-node payoff of any penalty inside the pricing support when rivals
    // offer at node a with probability alpha_a.
    std::vector<double> node_payoff(g.n_nodes);
    for (int a = 0; a < g.n_nodes; ++a)
        node_payoff[a] =
            (family.f(params.v, 1) - params.c) * (1.0 - win_prob(report.alpha[a], params));

    auto table = joint_table(model, g);
    report.pass = true;
    for (uint32_t mask = 1; mask < table.size(); ++mask) {
        if (table[mask] <= 0) continue;
        ConflictGraph sub = restrict_graph(g, mask);
        double expected = 0, best = 0;
        std::vector<int> best_set;
        for (const auto& comp_nodes : components(sub)) {
            ConflictGraph comp = induced(sub, comp_nodes);
            SetMix mix = component_mix(strategy, comp);
            for (size_t i = 0; i < mix.sets.size(); ++i) {
                double value = 0;
                for (int a : mix.sets[i]) value += node_payoff[a];
                expected += mix.probs[i] * value;
            }
            double comp_best = 0;
            std::vector<int> comp_best_set;
            for (const auto& set : independent_sets(comp, ISMode::Maximal)) {
                double value = 0;
                std::vector<int> labeled;
                for (int v : set) {
                    value += node_payoff[comp.label[v]];
                    labeled.push_back(comp.label[v]);
                }
                if (value > comp_best) {
                    comp_best = value;
                    comp_best_set = std::move(labeled);
                }
            }
            best += comp_best;
            best_set.insert(best_set.end(), comp_best_set.begin(), comp_best_set.end());
        }
        if (best > expected + 1e-9 && report.pass) {
            report.pass = false;
            report.witness_mask = mask;
            std::sort(best_set.begin(), best_set.end());
            report.witness_set = best_set;
            report.witness_gain = best - expected;
            report.detail = "profitable deviation at availability mask " + std::to_string(mask);
        }
    }
    return report;
}

LineFamilyReport line_family_audit(double r, double r1, double q, const MarketParams& params,
                                   const PenaltyFamily& family) {
    auto strategy = SetSelectionStrategy::line_family(r, r1);  // validates the constraint
    LineFamilyReport report;
    auto g = ConflictGraph::linear(4);
    auto model = ChannelStateModel::iid(q);

    // Structural identities between run probabilities on the 4-node path.
    auto t = [&](int i, int k) { return segment_probability(i, k, 4, q); };
    auto close = [](double a, double b) { return std::abs(a - b) < 1e-12; };
    bool identities = close(t(1, 3), t(2, 3)) && close(t(4, 1), t(1, 1)) &&
                      close(t(3, 1), t(2, 1)) && close(t(3, 2), t(1, 2)) &&
                      close(t(2, 1) + t(1, 2), t(1, 1)) && close(t(4, 1), t(3, 1) + t(3, 2));
    if (q == 0.5)
        identities = identities && close(t(2, 2), t(1, 4)) && close(t(1, 2), 2 * t(1, 4)) &&
                     close(t(3, 2), 2 * t(1, 4));
    if (!identities) {
        report.detail = "segment-probability identities failed";
        return report;
    }

    auto audit = selection_ne_audit(strategy, model, g, params, family);
    report.alpha = audit.alpha;
    report.alpha_spread = audit.alpha_spread;
    if (audit.alpha_spread >= 1e-12) {
        report.detail = "node offer probabilities differ across the path";
        return report;
    }
    if (!audit.pass) {
        report.detail = audit.detail;
        return report;
    }
    report.ne_confirmed = true;
    return report;
}

ComponentStatsReport component_stats(const ChannelStateModel& model, const ConflictGraph& g,
                                     int samples, std::mt19937_64& rng) {
    if (samples < 1) throw invalid_params("need at least one sample");
    ComponentStatsReport report;
    report.samples = samples;
    double sum_mean = 0, sum_mean_sq = 0, sum_largest = 0, sum_largest_sq = 0;
    std::vector<int> states;
    for (int it = 0; it < samples; ++it) {
        states = sample_states(model, g, rng);
        ConflictGraph sub = restrict_graph(g, states);
        double total = 0, total_sq = 0, largest = 0;
        for (const auto& comp : components(sub)) {
            double size = static_cast<double>(comp.size());
            total += size;
            total_sq += size * size;
            largest = std::max(largest, size);
        }
        double mean = total > 0 ? total_sq / total : 0.0;  // random available node's component
        sum_mean += mean;
        sum_mean_sq += mean * mean;
        sum_largest += largest;
        sum_largest_sq += largest * largest;
    }
    auto finish = [samples](double s, double s2) {
        double mean = s / samples;
        double var = std::max(0.0, s2 / samples - mean * mean);
        return std::pair<double, double>(mean, std::sqrt(var / samples));
    };
    std::tie(report.mean_component_size, report.stderr_component) = finish(sum_mean, sum_mean_sq);
    std::tie(report.mean_largest, report.stderr_largest) = finish(sum_largest, sum_largest_sq);
    try {
        double a = model.availability();
        double x = a * g.max_degree();
        if (x < 1.0) {
            report.bound = 1.0 / (1.0 - x);
            report.bound_finite = true;
        }
    } catch (const invalid_params&) {
        // non-IID model: no closed-form bound
    }
    return report;
}

}  // namespace oligo
