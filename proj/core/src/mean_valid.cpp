#include "oligo/mean_valid.hpp"

#include <algorithm>
#include <cmath>

namespace oligo {

void SameStateModel::validate(int n) const {
    if (static_cast<int>(q.size()) != n) throw invalid_params("state model needs one probability per state");
    double total = 0;
    for (double x : q) {
        if (x < 0) throw invalid_params("negative state probability");
        total += x;
    }
    if (total > 1.0 + 1e-12) throw invalid_params("state probabilities exceed 1");
}

namespace {

constexpr double kSnapTol = 1e-12;

// Solve M_s * W(t*qj + base) = level for t in [0,1]; clamped at the ends.
double solve_mass(double Ms, double base, double qj, double level, const MarketParams& params) {
    auto value = [&](double t) { return Ms * (1.0 - win_prob(std::min(t * qj + base, 1.0), params)); };
    if (level >= value(0.0) - 1e-15) return 0.0;
    if (level <= value(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        if (value(mid) > level)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void finish(MeanValidEquilibrium& eq, const SameStateModel& model, const MarketParams& params,
            const PenaltyFamily& family) {
    const int n = static_cast<int>(model.q.size());
    const int d = eq.n_sets();
    eq.alpha.assign(d, std::vector<double>(n, 0.0));
    for (int s = 0; s < d; ++s)
        for (int j = 0; j < n; ++j) eq.alpha[s][j] = model.q[j] * eq.t[j][s];
    eq.pricing.clear();
    for (int s = 0; s < d; ++s)
        eq.pricing.push_back(solve_single_location(params, family, eq.alpha[s]));
    // Conforming payoff per state: expectation over the selection mix. At an
    // equilibrium every set in the support yields the same value.
    eq.payoff.assign(n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int s = 0; s < d; ++s)
            if (eq.t[j][s] > 0)
                eq.payoff[j] += eq.t[j][s] * eq.M[s] * (eq.pricing[s].p[j] - params.c);
    eq.d.assign(n, 0);
    for (int j = 0; j < n; ++j)
        for (int s = 0; s < d; ++s)
            if (eq.t[j][s] > 0) eq.d[j] = s + 1;
}

}  // namespace

MeanValidEquilibrium solve_mean_valid(const std::vector<int>& M, const SameStateModel& model,
                                      const MarketParams& params, const PenaltyFamily& family,
                                      double split) {
    validate_market(params, family);
    const int n = params.n;
    model.validate(n);
    if (M.empty()) throw invalid_params("need at least one set");
    for (size_t s = 0; s + 1 < M.size(); ++s)
        if (M[s] < M[s + 1]) throw invalid_params("cardinalities must be sorted descending");
    if (M.back() < 1) throw invalid_params("cardinalities must be positive");
    if (split <= 0.0 || split >= 1.0) throw invalid_params("split must be in (0,1)");

    const int d = static_cast<int>(M.size());
    MeanValidEquilibrium eq;
    eq.M = M;
    eq.t.assign(n, std::vector<double>(d, 0.0));
    eq.gamma.assign(n, std::vector<double>(d, 0.0));

    if (params.demand.is_fixed() && params.demand.fixed_m() >= params.l) {
        // Every offer sells regardless of price, so the largest set dominates.
        eq.degenerate = true;
        for (int j = 0; j < n; ++j) eq.t[j][0] = 1.0;
        for (int j = n - 1; j >= 0; --j)
            for (int s = 0; s < d; ++s)
                eq.gamma[j][s] = eq.t[j][s] * model.q[j] + (j + 1 < n ? eq.gamma[j + 1][s] : 0.0);
        finish(eq, model, params, family);
        return eq;
    }

    auto W = [&](double x) { return 1.0 - win_prob(std::min(x, 1.0), params); };

    std::vector<double> gamma_below(d, 0.0);  // gamma_{s,j+1}
    for (int j = n - 1; j >= 0; --j) {
        const double qj = model.q[j];
        auto masses = [&](double level, std::vector<double>& t_out) {
            double total = 0;
            for (int s = 0; s < d; ++s) {
                t_out[s] = qj > 0 ? solve_mass(M[s], gamma_below[s], qj, level, params) : 0.0;
                total += t_out[s];
            }
            return total;
        };
        std::vector<double> t_row(d, 0.0);
        if (qj <= 0) {
            // state never occurs; keep a valid column by assigning it to set 1
            t_row[0] = 1.0;
        } else {
            double hi = M[0] * W(gamma_below[0]);
            double lo = M[0] * W(qj + gamma_below[0]);
            if (masses(lo, t_row) <= 1.0 + 1e-14) {
                // Boundary: the largest set takes everything. When demand is
                // so deep that the win probability is flat at double precision
                // the per-set solves all clamp to zero, so force the mass in
                // rather than keeping an empty row.
                std::fill(t_row.begin(), t_row.end(), 0.0);
                t_row[0] = 1.0;
            } else {
                double x = lo, fx = 0;
                for (int it = 0; it < 120; ++it) {
                    x = lo + split * (hi - lo);
                    fx = masses(x, t_row) - 1.0;
                    if (std::abs(fx) < 1e-13 || hi - lo < 1e-15 * std::max(1.0, hi)) break;
                    if (fx > 0)
                        lo = x;
                    else
                        hi = x;
                }
                // secant polish in case the mass is steep in the level
                double x1 = (fx > 0 ? hi : lo), f1 = masses(x1, t_row) - 1.0;
                for (int it = 0; it < 20 && std::abs(fx) > 1e-14 && std::abs(f1 - fx) > 0; ++it) {
                    double x2 = x - fx * (x1 - x) / (f1 - fx);
                    if (!std::isfinite(x2)) break;
                    // the total mass may jump discontinuously, which makes the
                    // secant extrapolate; stay inside the bisection bracket
                    x2 = std::clamp(x2, lo, hi);
                    if (x2 == x) break;
                    x1 = x;
                    f1 = fx;
                    x = x2;
                    fx = masses(x, t_row) - 1.0;
                }
                double total = masses(x, t_row);
                if (std::abs(total - 1.0) > 1e-13) {
                    // Deep demand can make a set's value numerically flat in
                    // its own mass, so the total mass jumps (or quantizes)
                    // past 1 as the level crosses that set's pinned value.
                    // Park the residual on the active sets, weighted by how
                    // insensitive their value is to the mass: that keeps the
                    // solved payoff level intact to double precision.
                    std::vector<double> weight(d, 0.0);
                    for (int s = 0; s < d; ++s) {
                        double v0 = M[s] * W(gamma_below[s]);
                        bool active = t_row[s] > 0.0 || v0 >= x - 1e-6 * std::max(1.0, x);
                        if (!active) continue;
                        const double h = 1e-7;
                        double a = std::max(t_row[s] - h, 0.0);
                        double b = std::min(t_row[s] + h, 1.0);
                        double diff = std::abs(M[s] * W(a * qj + gamma_below[s]) -
                                               M[s] * W(b * qj + gamma_below[s]));
                        // differences of a few ulps are rounding noise, not a
                        // real sensitivity; treat the set as flat then
                        if (diff <= 8 * 2.2e-16 * std::max(1.0, v0)) diff = 0.0;
                        weight[s] = 1.0 / std::max(diff / (b - a), 1e-300);
                    }
                    double residual = 1.0 - total;
                    for (int pass = 0; pass < 8 && std::abs(residual) > 1e-15; ++pass) {
                        double wsum = 0;
                        for (int s = 0; s < d; ++s) {
                            bool movable = residual > 0 ? t_row[s] < 1.0 : t_row[s] > 0.0;
                            wsum += (weight[s] > 0 && movable) ? weight[s] : 0.0;
                        }
                        if (wsum <= 0) break;
                        for (int s = 0; s < d; ++s) {
                            bool movable = residual > 0 ? t_row[s] < 1.0 : t_row[s] > 0.0;
                            if (weight[s] <= 0 || !movable) continue;
                            t_row[s] = std::clamp(t_row[s] + residual * weight[s] / wsum, 0.0, 1.0);
                        }
                        residual = 1.0;
                        for (int s = 0; s < d; ++s) residual -= t_row[s];
                    }
                    if (std::abs(residual) > 1e-13) {
                        // nothing adjustable: competition is numerically inert
                        std::fill(t_row.begin(), t_row.end(), 0.0);
                        t_row[0] = 1.0;
                    }
                }
            }
        }
        for (int s = 0; s < d; ++s) {
            if (t_row[s] < kSnapTol) t_row[s] = 0.0;
            eq.t[j][s] = t_row[s];
            eq.gamma[j][s] = t_row[s] * qj + gamma_below[s];
        }
        gamma_below = eq.gamma[j];
    }
    finish(eq, model, params, family);
    return eq;
}

MeanValidEquilibrium equilibrium_from_t(const std::vector<std::vector<double>>& t,
                                        const std::vector<int>& M, const SameStateModel& model,
                                        const MarketParams& params, const PenaltyFamily& family) {
    const int n = params.n;
    const int d = static_cast<int>(M.size());
    if (static_cast<int>(t.size()) != n) throw invalid_params("t must have one row per state");
    MeanValidEquilibrium eq;
    eq.M = M;
    eq.t = t;
    eq.gamma.assign(n, std::vector<double>(d, 0.0));
    for (int j = n - 1; j >= 0; --j)
        for (int s = 0; s < d; ++s)
            eq.gamma[j][s] = t[j][s] * model.q[j] + (j + 1 < n ? eq.gamma[j + 1][s] : 0.0);
    finish(eq, model, params, family);
    return eq;
}

namespace {

// Best payoff a state-j deviator can get at one node of set s, maximizing the
// penalty over the support endpoints plus a safety grid.
double node_best_payoff(int j, int s, const MeanValidEquilibrium& eq, const MarketParams& params,
                        const PenaltyFamily& family, int grid_points) {
    const auto& sol = eq.pricing[s];
    const auto& alpha = eq.alpha[s];
    const int n = sol.n();
    const double lo = sol.L[n - 1];
    double best = 0;
    auto consider = [&](double x) {
        if (x < lo || x > params.v) return;
        best = std::max(best, expected_payoff_at(x, j, alpha, sol, params, family));
    };
    for (int k = 0; k < n; ++k) {
        consider(sol.L[k]);
        consider(sol.U[k]);
    }
    consider(params.v);
    for (int i = 1; i < grid_points; ++i)
        consider(lo + (params.v - lo) * i / grid_points);
    return best;
}

}  // namespace

BestResponseReport best_response_audit(const ConflictGraph& g, const Partition& partition,
                                       const MeanValidEquilibrium& eq, const SameStateModel& model,
                                       const MarketParams& params, const PenaltyFamily& family,
                                       int grid_points) {
    BestResponseReport report;
    const int n = eq.n_states();
    const int d = eq.n_sets();
    std::vector<int> owner(g.n_nodes, -1);
    for (int s = 0; s < d; ++s)
        for (int a : partition.sets[s]) owner[a] = s;

    // Per-node candidates depend only on (state, owning set): cache them.
    std::vector<std::vector<double>> best_at(n, std::vector<double>(d, 0.0));
    for (int j = 0; j < n; ++j)
        for (int s = 0; s < d; ++s)
            best_at[j][s] = node_best_payoff(j + 1, s, eq, params, family, grid_points);

    auto maximal = independent_sets(g, ISMode::Maximal);
    report.conforming.assign(n, 0.0);
    report.best_deviation.assign(n, 0.0);
    report.pass = true;
    report.partition_sets_attain = true;
    for (int j = 0; j < n; ++j) {
        const double ref = eq.payoff[j];
        report.conforming[j] = ref;
        double best = 0;
        std::vector<int> best_set;
        for (const auto& set : maximal) {
            double value = 0;
            for (int a : set) value += best_at[j][owner[a]];
            if (value > best) {
                best = value;
                best_set = set;
            }
        }
        report.best_deviation[j] = best;
        if (best > ref + 1e-9) {
            report.pass = false;
            if (!report.witness)
                report.witness = DeviationWitness{j + 1, best_set, best, ref};
        }
        // the partition's own supported sets should attain the optimum
        for (int s = 0; s < eq.d[j]; ++s) {
            double value = 0;
            for (int a : partition.sets[s]) value += best_at[j][owner[a]];
            if (std::abs(value - ref) > 1e-6 * std::max(1.0, std::abs(ref)))
                report.partition_sets_attain = false;
        }
    }
    return report;
}

PartitionEquivalenceReport partition_equivalence_audit(const ConflictGraph& g, const Partition& a,
                                                       const Partition& b,
                                                       const SameStateModel& model,
                                                       const MarketParams& params,
                                                       const PenaltyFamily& family) {
    PartitionEquivalenceReport report;
    auto ra = check_mean_valid(g, a);
    auto rb = check_mean_valid(g, b);
    if (!ra.valid || !rb.valid) {
        report.detail = !ra.valid ? "first partition invalid: " + ra.reason
                                  : "second partition invalid: " + rb.reason;
        return report;
    }
    auto ca = a.cardinalities();
    auto cb = b.cardinalities();
    if (ca != cb) {
        report.detail = "sorted cardinalities differ";
        return report;
    }
    // Unequal-cardinality sets must not share nodes.
    for (const auto& sa : a.sets)
        for (const auto& sb : b.sets) {
            if (sa.size() == sb.size()) continue;
            for (int x : sa)
                if (std::find(sb.begin(), sb.end(), x) != sb.end()) {
                    report.detail = "node " + std::to_string(x) + " sits in sets of unequal cardinality";
                    return report;
                }
        }
    auto eq = solve_mean_valid(ca, model, params, family);
    std::vector<int> owner_a(g.n_nodes), owner_b(g.n_nodes);
    for (size_t s = 0; s < a.sets.size(); ++s)
        for (int x : a.sets[s]) owner_a[x] = static_cast<int>(s);
    for (size_t s = 0; s < b.sets.size(); ++s)
        for (int x : b.sets[s]) owner_b[x] = static_cast<int>(s);
    double max_diff = 0;
    for (int x = 0; x < g.n_nodes; ++x)
        for (int j = 0; j < eq.n_states(); ++j)
            max_diff = std::max(max_diff,
                                std::abs(eq.alpha[owner_a[x]][j] - eq.alpha[owner_b[x]][j]));
    report.max_alpha_diff = max_diff;
    report.pass = max_diff < 1e-9;
    if (!report.pass) report.detail = "per-node offer probabilities differ";
    return report;
}

}  // namespace oligo
