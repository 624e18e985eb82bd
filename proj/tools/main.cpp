// Command-line front end for the oligopoly solver library. Subcommands map
// one-to-one onto library operations; every run is reproducible: the same
// config and seed produce byte-identical output files.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oligo/graph.hpp"
#include "oligo/market.hpp"
#include "oligo/mean_valid.hpp"
#include "oligo/simulate.hpp"
#include "oligo/spsym.hpp"
#include "oligo/state_model.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitAuditFailed = 2;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "both";  // csv | json | both
    long long seed = -1;          // overrides config when >= 0
    bool describe = false;
};

std::string fmt_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json load_config(const CommonOpts& opts) {
    if (opts.config_path.empty()) throw oligo::invalid_params("--config is required");
    std::ifstream in(opts.config_path);
    if (!in) throw oligo::invalid_params("cannot open config: " + opts.config_path);
    json cfg = json::parse(in);
    if (!cfg.contains("schema") || cfg["schema"].get<int>() != 1)
        throw oligo::invalid_params("config must declare \"schema\": 1");
    return cfg;
}

long long require_seed(const CommonOpts& opts, const json& cfg) {
    if (opts.seed >= 0) return opts.seed;
    if (cfg.contains("seed")) return cfg["seed"].get<long long>();
    throw oligo::invalid_params("stochastic command needs a seed (--seed or config \"seed\")");
}

oligo::MarketParams parse_market(const json& cfg) {
    if (!cfg.contains("market")) throw oligo::invalid_params("config missing \"market\"");
    const json& m = cfg["market"];
    oligo::MarketParams params;
    params.l = m.at("l").get<int>();
    params.n = m.value("n", 1);
    params.v = m.at("v").get<double>();
    params.c = m.value("c", 0.0);
    if (m.contains("demand_pmf"))
        params.demand = oligo::DemandModel::random_demand(m["demand_pmf"].get<std::vector<double>>());
    else
        params.demand = oligo::DemandModel::fixed_demand(m.at("m").get<int>());
    return params;
}

oligo::PenaltyFamily parse_family(const json& cfg) {
    std::string kind = cfg.at("market").value("penalty_family", "identity");
    return oligo::PenaltyFamily::by_name(kind);
}

oligo::ConflictGraph parse_graph(const json& cfg) {
    if (!cfg.contains("graph")) throw oligo::invalid_params("config missing \"graph\"");
    const json& g = cfg["graph"];
    std::string kind = g.at("kind").get<std::string>();
    if (kind == "empty") return oligo::ConflictGraph::empty(g.at("n").get<int>());
    if (kind == "linear") return oligo::ConflictGraph::linear(g.at("n").get<int>());
    if (kind == "cycle") return oligo::ConflictGraph::cycle(g.at("n").get<int>());
    if (kind == "king-grid") return oligo::ConflictGraph::king_grid(g.at("size").get<int>());
    if (kind == "complete") return oligo::ConflictGraph::complete(g.at("n").get<int>());
    if (kind == "circulant")
        return oligo::ConflictGraph::circulant(g.at("n").get<int>(),
                                               g.at("hops").get<std::vector<int>>());
    if (kind == "edge-list") {
        int n = g.value("n", -1);
        if (g.contains("edges") && g["edges"].is_array()) {
            std::vector<std::pair<int, int>> edges;
            int max_id = -1;
            for (const auto& e : g["edges"]) {
                edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
                max_id = std::max({max_id, edges.back().first, edges.back().second});
            }
            return oligo::ConflictGraph::from_edges(n < 0 ? max_id + 1 : n, edges);
        }
        std::istringstream in(g.at("edges").get<std::string>());
        return oligo::ConflictGraph::parse_edge_list(in, n);
    }
    throw oligo::invalid_params("unknown graph kind: " + kind);
}

oligo::ChannelStateModel parse_state_model(const json& cfg) {
    if (!cfg.contains("state_model")) throw oligo::invalid_params("config missing \"state_model\"");
    const json& s = cfg["state_model"];
    std::string kind = s.at("kind").get<std::string>();
    if (kind == "same-everywhere")
        return oligo::ChannelStateModel::same_everywhere(s.at("q").get<std::vector<double>>());
    if (kind == "iid") return oligo::ChannelStateModel::iid(s.at("q").get<double>());
    if (kind == "sampled-iid")
        return oligo::ChannelStateModel::sampled_iid(s.at("q").get<double>(),
                                                     s.at("p").get<double>());
    if (kind == "mrf") return oligo::ChannelStateModel::mrf(s.at("zeta").get<std::vector<double>>());
    if (kind == "explicit")
        return oligo::ChannelStateModel::explicit_joint(s.at("joint").get<std::vector<double>>());
    throw oligo::invalid_params("unknown state model kind: " + kind);
}

oligo::SameStateModel parse_same_state(const json& cfg) {
    const json& s = cfg.at("state_model");
    if (s.at("kind").get<std::string>() != "same-everywhere")
        throw oligo::invalid_params("this command needs a same-everywhere state model");
    return oligo::SameStateModel{s.at("q").get<std::vector<double>>()};
}

oligo::Partition parse_partition(const json& cfg, const char* key = "partition") {
    if (!cfg.contains(key)) throw oligo::invalid_params(std::string("config missing \"") + key + "\"");
    oligo::Partition part;
    part.sets = cfg[key].get<std::vector<std::vector<int>>>();
    return part;
}

std::vector<int> parse_cardinalities(const json& cfg) {
    if (cfg.contains("cardinalities")) return cfg["cardinalities"].get<std::vector<int>>();
    return parse_partition(cfg).cardinalities();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw oligo::invalid_params("cannot write " + path.string());
    out << text;
}

// Emits <name>.csv and/or <name>.json under --out-dir per --format.
void emit(const CommonOpts& opts, const std::string& name,
          const std::vector<std::string>& header,
          const std::vector<std::vector<std::string>>& rows, const json& summary) {
    std::filesystem::create_directories(opts.out_dir);
    std::filesystem::path dir(opts.out_dir);
    if (opts.format != "json") {
        std::string csv;
        for (size_t i = 0; i < header.size(); ++i) csv += (i ? "," : "") + header[i];
        csv += "\n";
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) csv += (i ? "," : "") + row[i];
            csv += "\n";
        }
        write_file(dir / (name + ".csv"), csv);
    }
    if (opts.format != "csv") write_file(dir / (name + ".json"), summary.dump(2) + "\n");
}

int describe(const std::string& name, const std::vector<std::pair<std::string, std::string>>& cols) {
    std::cout << name << " output columns:\n";
    for (const auto& [col, doc] : cols) std::cout << "  " << col << ": " << doc << "\n";
    return kExitOk;
}

json market_echo(const oligo::MarketParams& params, const json& cfg) {
    json m;
    m["l"] = params.l;
    if (params.demand.is_fixed())
        m["m"] = params.demand.fixed_m();
    else
        m["demand_pmf"] = params.demand.kappa;
    m["n"] = params.n;
    m["v"] = params.v;
    m["c"] = params.c;
    m["penalty_family"] = cfg.at("market").value("penalty_family", "identity");
    return m;
}

// ---------------------------------------------------------------- pricing

int cmd_pricing(const CommonOpts& opts) {
    if (opts.describe)
        return describe("pricing", {{"j", "channel state (1 = worst non-zero state)"},
                                    {"alpha_j", "probability a rival offers a state-j channel here"},
                                    {"p_j", "price whose payoff is attained on the whole support"},
                                    {"L_j", "lower end of the state-j penalty support"},
                                    {"U_j", "upper end of the state-j penalty support"}});
    json cfg = load_config(opts);
    auto params = parse_market(cfg);
    auto family = parse_family(cfg);
    std::vector<double> alpha;
    if (cfg.contains("alpha"))
        alpha = cfg["alpha"].get<std::vector<double>>();
    else
        alpha = cfg.at("state_model").at("q").get<std::vector<double>>();
    auto sol = oligo::solve_single_location(params, family, alpha);

    std::vector<std::vector<std::string>> rows;
    for (int j = 1; j <= sol.n(); ++j)
        rows.push_back({std::to_string(j), fmt_num(alpha[j - 1]), fmt_num(sol.p[j - 1]),
                        fmt_num(sol.L[j - 1]), fmt_num(sol.U[j - 1])});
    json summary;
    summary["market"] = market_echo(params, cfg);
    summary["alpha"] = alpha;
    summary["degenerate"] = sol.degenerate;
    summary["p"] = sol.p;
    summary["L"] = sol.L;
    summary["U"] = sol.U;
    emit(opts, "pricing", {"j", "alpha_j", "p_j", "L_j", "U_j"}, rows, summary);
    std::cout << "pricing: solved " << sol.n() << " states\n";
    return kExitOk;
}

// -------------------------------------------------------------- mean-valid

int cmd_mean_valid(const CommonOpts& opts) {
    if (opts.describe)
        return describe("mean-valid",
                        {{"s", "partition set index (1 = largest cardinality)"},
                         {"j", "channel state"},
                         {"t_sj", "probability of selecting set s at state j"},
                         {"gamma_sj", "rival offer probability of state >= j at a set-s node"},
                         {"alpha_sj", "q_j * t_sj, the per-node state-j offer probability"},
                         {"p_sj", "support-constant price for state j on set s"},
                         {"L_sj", "lower penalty support end"},
                         {"U_sj", "upper penalty support end"}});
    json cfg = load_config(opts);
    auto params = parse_market(cfg);
    auto family = parse_family(cfg);
    auto model = parse_same_state(cfg);
    auto M = parse_cardinalities(cfg);
    double split = cfg.value("split", 0.5);
    auto eq = oligo::solve_mean_valid(M, model, params, family, split);

    std::vector<std::vector<std::string>> rows;
    for (int s = 1; s <= eq.n_sets(); ++s)
        for (int j = 1; j <= eq.n_states(); ++j)
            rows.push_back({std::to_string(s), std::to_string(j), fmt_num(eq.t[j - 1][s - 1]),
                            fmt_num(eq.gamma[j - 1][s - 1]), fmt_num(eq.alpha[s - 1][j - 1]),
                            fmt_num(eq.pricing[s - 1].p[j - 1]), fmt_num(eq.pricing[s - 1].L[j - 1]),
                            fmt_num(eq.pricing[s - 1].U[j - 1])});
    json summary;
    summary["market"] = market_echo(params, cfg);
    summary["M"] = eq.M;
    summary["t"] = eq.t;
    summary["gamma"] = eq.gamma;
    summary["d"] = eq.d;
    summary["payoff"] = eq.payoff;
    summary["degenerate"] = eq.degenerate;
    emit(opts, "mean_valid", {"s", "j", "t_sj", "gamma_sj", "alpha_sj", "p_sj", "L_sj", "U_sj"},
         rows, summary);
    std::cout << "mean-valid: solved " << eq.n_states() << " states over " << eq.n_sets()
              << " sets\n";
    return kExitOk;
}

// ---------------------------------------------------------------- audit-ne

int cmd_audit_ne(const CommonOpts& opts) {
    if (opts.describe)
        return describe("audit-ne",
                        {{"j", "channel state"},
                         {"conforming", "equilibrium payoff of a conforming seller at state j"},
                         {"best_deviation", "best payoff over all maximal independent sets"}});
    json cfg = load_config(opts);
    auto params = parse_market(cfg);
    auto family = parse_family(cfg);
    auto model = parse_same_state(cfg);
    auto g = parse_graph(cfg);
    auto partition = parse_partition(cfg);
    auto valid = oligo::check_mean_valid(g, partition);
    if (!valid.valid) throw oligo::invalid_params("partition rejected: " + valid.reason);
    auto eq = oligo::solve_mean_valid(partition.cardinalities(), model, params, family);
    auto report = oligo::best_response_audit(g, partition, eq, model, params, family);

    json summary;
    summary["pass"] = report.pass;
    summary["conforming"] = report.conforming;
    summary["best_deviation"] = report.best_deviation;
    summary["partition_sets_attain"] = report.partition_sets_attain;
    if (report.witness) {
        summary["witness"] = {{"state", report.witness->state},
                              {"set", report.witness->set},
                              {"payoff", report.witness->payoff},
                              {"reference", report.witness->reference}};
    }
    bool equivalence_pass = true;
    if (cfg.contains("partition_b")) {
        auto b = parse_partition(cfg, "partition_b");
        auto eqv = oligo::partition_equivalence_audit(g, partition, b, model, params, family);
        summary["equivalence"] = {{"pass", eqv.pass},
                                  {"detail", eqv.detail},
                                  {"max_alpha_diff", eqv.max_alpha_diff}};
        equivalence_pass = eqv.pass;
    }
    std::vector<std::vector<std::string>> rows;
    for (int j = 1; j <= eq.n_states(); ++j)
        rows.push_back({std::to_string(j), fmt_num(report.conforming[j - 1]),
                        fmt_num(report.best_deviation[j - 1])});
    emit(opts, "audit_ne", {"j", "conforming", "best_deviation"}, rows, summary);
    if (!report.pass || !equivalence_pass) {
        std::cout << "audit-ne: FAILED\n";
        return kExitAuditFailed;
    }
    std::cout << "audit-ne: passed\n";
    return kExitOk;
}

// -------------------------------------------------------------- spsym-audit

int cmd_spsym_audit(const CommonOpts& opts) {
    if (opts.describe)
        return describe("spsym_audit", {{"node", "location id"},
                                        {"alpha", "probability a seller offers at this node"}});
    json cfg = load_config(opts);
    auto params = parse_market(cfg);
    auto family = parse_family(cfg);
    auto model = parse_state_model(cfg);
    auto g = parse_graph(cfg);
    auto report =
        oligo::selection_ne_audit(oligo::SetSelectionStrategy::spsym(), model, g, params, family);

    std::vector<std::vector<std::string>> rows;
    for (int a = 0; a < g.n_nodes; ++a)
        rows.push_back({std::to_string(a), fmt_num(report.alpha[a])});
    json summary;
    summary["pass"] = report.pass;
    summary["alpha"] = report.alpha;
    summary["alpha_spread"] = report.alpha_spread;
    if (!report.pass) {
        summary["detail"] = report.detail;
        summary["witness_mask"] = *report.witness_mask;
        summary["witness_set"] = report.witness_set;
        summary["witness_gain"] = report.witness_gain;
    }
    emit(opts, "spsym_audit", {"node", "alpha"}, rows, summary);
    if (!report.pass) {
        std::cout << "spsym-audit: FAILED (" << report.detail << ")\n";
        return kExitAuditFailed;
    }
    std::cout << "spsym-audit: passed\n";
    return kExitOk;
}

// ------------------------------------------------------------ linear-family

int cmd_linear_family(const CommonOpts& opts, double r, double r1) {
    if (opts.describe)
        return describe("linear_family", {{"node", "path node id"},
                                          {"alpha", "offer probability at this node"}});
    json cfg = load_config(opts);
    auto params = parse_market(cfg);
    auto family = parse_family(cfg);
    if (std::isnan(r)) r = cfg.at("r").get<double>();
    if (std::isnan(r1)) r1 = cfg.at("r1").get<double>();
    double q = cfg.contains("state_model") ? cfg["state_model"].value("q", 0.5) : 0.5;
    auto report = oligo::line_family_audit(r, r1, q, params, family);

    std::vector<std::vector<std::string>> rows;
    for (size_t a = 0; a < report.alpha.size(); ++a)
        rows.push_back({std::to_string(a), fmt_num(report.alpha[a])});
    json summary;
    summary["r"] = r;
    summary["r1"] = r1;
    summary["ne_confirmed"] = report.ne_confirmed;
    summary["alpha"] = report.alpha;
    summary["alpha_spread"] = report.alpha_spread;
    if (!report.ne_confirmed) summary["detail"] = report.detail;
    emit(opts, "linear_family", {"node", "alpha"}, rows, summary);
    if (!report.ne_confirmed) {
        std::cout << "linear-family: FAILED (" << report.detail << ")\n";
        return kExitAuditFailed;
    }
    std::cout << "linear-family: NE confirmed\n";
    return kExitOk;
}

// -------------------------------------------------------------- components

int cmd_components(const CommonOpts& opts, int samples_flag) {
    if (opts.describe)
        return describe("components",
                        {{"mean_component_size", "mean size of a random available node's component"},
                         {"stderr_component", "standard error of that mean"},
                         {"mean_largest", "mean size of the largest component"},
                         {"stderr_largest", "standard error of that mean"},
                         {"bound", "analytic branching bound (blank when infinite)"},
                         {"samples", "Monte Carlo sample count"}});
    json cfg = load_config(opts);
    auto model = parse_state_model(cfg);
    auto g = parse_graph(cfg);
    int samples = samples_flag > 0 ? samples_flag : cfg.value("samples", 10000);
    std::mt19937_64 rng(static_cast<uint64_t>(require_seed(opts, cfg)));
    auto report = oligo::component_stats(model, g, samples, rng);

    std::vector<std::vector<std::string>> rows{
        {fmt_num(report.mean_component_size), fmt_num(report.stderr_component),
         fmt_num(report.mean_largest), fmt_num(report.stderr_largest),
         report.bound_finite ? fmt_num(report.bound) : "", std::to_string(report.samples)}};
    json summary;
    summary["mean_component_size"] = report.mean_component_size;
    summary["stderr_component"] = report.stderr_component;
    summary["mean_largest"] = report.mean_largest;
    summary["stderr_largest"] = report.stderr_largest;
    summary["bound_finite"] = report.bound_finite;
    if (report.bound_finite) summary["bound"] = report.bound;
    summary["samples"] = report.samples;
    emit(opts, "components",
         {"mean_component_size", "stderr_component", "mean_largest", "stderr_largest", "bound",
          "samples"},
         rows, summary);
    std::cout << "components: mean size " << fmt_num(report.mean_component_size) << "\n";
    return kExitOk;
}

// --------------------------------------------------------------- mrf-audit

int cmd_mrf_audit(const CommonOpts& opts) {
    if (opts.describe)
        return describe("mrf_audit", {{"mask", "availability bitmask (bit a = node a available)"},
                                      {"prob", "joint probability of the mask"}});
    json cfg = load_config(opts);
    auto model = parse_state_model(cfg);
    auto g = parse_graph(cfg);
    auto table = oligo::joint_table(model, g);
    double total = 0;
    for (double x : table) total += x;
    bool normalized = std::abs(total - 1.0) <= 1e-10;
    auto report = oligo::audit_isomorphism_invariance(model, g);

    std::vector<std::vector<std::string>> rows;
    for (size_t mask = 0; mask < table.size(); ++mask)
        rows.push_back({std::to_string(mask), fmt_num(table[mask])});
    json summary;
    summary["pass"] = report.pass && normalized;
    summary["normalized"] = normalized;
    summary["total_mass"] = total;
    summary["max_isomorphic_diff"] = report.max_diff;
    summary["r_profile"] = report.r_profile;
    summary["r_uniform"] = report.r_uniform;
    if (!report.pass) summary["detail"] = report.detail;
    emit(opts, "mrf_audit", {"mask", "prob"}, rows, summary);
    if (!report.pass || !normalized) {
        std::cout << "mrf-audit: FAILED\n";
        return kExitAuditFailed;
    }
    std::cout << "mrf-audit: passed\n";
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CommonOpts& opts, int setting, int rounds_flag) {
    if (opts.describe)
        return describe("simulate",
                        {{"mean", "empirical mean per-seller payoff"},
                         {"stderr", "standard error of the mean"},
                         {"analytic", "closed-form equilibrium payoff"},
                         {"z", "(mean - analytic) / stderr"},
                         {"rounds", "simulated rounds"}});
    json cfg = load_config(opts);
    auto params = parse_market(cfg);
    auto family = parse_family(cfg);
    auto g = parse_graph(cfg);
    int rounds = rounds_flag > 0 ? rounds_flag : cfg.value("rounds", 100000);
    if (setting == 0) setting = cfg.value("setting", 1);
    std::mt19937_64 rng(static_cast<uint64_t>(require_seed(opts, cfg)));

    oligo::PayoffEstimate est;
    if (setting == 1) {
        auto model = parse_same_state(cfg);
        auto partition = parse_partition(cfg);
        oligo::MeanValidProfile profile{partition, {}, model, params, family};
        profile.eq =
            oligo::solve_mean_valid(partition.cardinalities(), model, params, family);
        est = oligo::estimate_ne_payoff(profile, g, rounds, rng);
    } else if (setting == 2) {
        auto model = parse_state_model(cfg);
        auto profile = oligo::make_spsym_profile(model, g, params, family);
        est = oligo::estimate_ne_payoff(profile, g, rounds, rng);
    } else {
        throw oligo::invalid_params("setting must be 1 or 2");
    }
    double z = est.stderr_mean > 0 ? (est.mean - est.analytic) / est.stderr_mean : 0.0;
    std::vector<std::vector<std::string>> rows{{fmt_num(est.mean), fmt_num(est.stderr_mean),
                                                fmt_num(est.analytic), fmt_num(z),
                                                std::to_string(est.rounds)}};
    json summary;
    summary["setting"] = setting;
    summary["mean"] = est.mean;
    summary["stderr"] = est.stderr_mean;
    summary["analytic"] = est.analytic;
    summary["z"] = z;
    summary["rounds"] = est.rounds;
    emit(opts, "simulate", {"mean", "stderr", "analytic", "z", "rounds"}, rows, summary);
    std::cout << "simulate: mean " << fmt_num(est.mean) << " vs analytic "
              << fmt_num(est.analytic) << " (z = " << fmt_num(z) << ")\n";
    return kExitOk;
}

// -------------------------------------------------------------- efficiency

int cmd_efficiency(const CommonOpts& opts, std::string m_list_flag, int rounds_flag) {
    if (opts.describe)
        return describe("efficiency",
                        {{"m", "per-node demand (buyers per location)"},
                         {"ne_welfare", "mean total equilibrium welfare per round"},
                         {"stderr", "standard error of ne_welfare"},
                         {"r_opt", "mean collusion-optimal welfare per round"},
                         {"eta", "ne_welfare / r_opt over paired realizations"},
                         {"eta_stderr", "ratio-estimator standard error of eta"}});
    json cfg = load_config(opts);
    auto params = parse_market(cfg);
    auto family = parse_family(cfg);
    auto model = parse_same_state(cfg);
    auto g = parse_graph(cfg);
    auto partition = parse_partition(cfg);
    int rounds = rounds_flag > 0 ? rounds_flag : cfg.value("rounds", 100000);
    std::vector<int> m_list;
    if (!m_list_flag.empty()) {
        std::stringstream ss(m_list_flag);
        for (std::string tok; std::getline(ss, tok, ',');) m_list.push_back(std::stoi(tok));
    } else {
        m_list = cfg.at("m_list").get<std::vector<int>>();
    }
    std::mt19937_64 rng(static_cast<uint64_t>(require_seed(opts, cfg)));
    auto curve = oligo::efficiency_curve(m_list, g, partition, model, params, family, rounds, rng);

    std::vector<std::vector<std::string>> rows;
    json points = json::array();
    for (const auto& pt : curve) {
        rows.push_back({std::to_string(pt.m), fmt_num(pt.ne_welfare), fmt_num(pt.ne_stderr),
                        fmt_num(pt.r_opt), fmt_num(pt.eta), fmt_num(pt.eta_stderr)});
        points.push_back({{"m", pt.m},
                          {"ne_welfare", pt.ne_welfare},
                          {"stderr", pt.ne_stderr},
                          {"r_opt", pt.r_opt},
                          {"eta", pt.eta},
                          {"eta_stderr", pt.eta_stderr}});
    }
    json summary;
    summary["rounds"] = rounds;
    summary["points"] = points;
    emit(opts, "efficiency", {"m", "ne_welfare", "stderr", "r_opt", "eta", "eta_stderr"}, rows,
         summary);
    std::cout << "efficiency: " << curve.size() << " demand levels\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectrum-market equilibrium solver, auditor and simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    int setting = 0, rounds = 0, samples = 0;
    double r = std::nan(""), r1 = std::nan("");
    std::string m_list;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "JSON experiment config");
        sub->add_option("--seed", opts.seed, "RNG seed (overrides config)");
        sub->add_option("--out-dir", opts.out_dir, "output directory");
        sub->add_option("--format", opts.format, "csv, json or both")
            ->check(CLI::IsMember({"csv", "json", "both"}));
        sub->add_flag("--describe", opts.describe, "document the output columns and exit");
        return sub;
    };

    auto* pricing = add_common(app.add_subcommand("pricing", "single-location pricing chain"));
    auto* mean_valid =
        add_common(app.add_subcommand("mean-valid", "partition-strategy equilibrium solve"));
    auto* audit_ne = add_common(app.add_subcommand("audit-ne", "best-response audit"));
    auto* spsym_audit =
        add_common(app.add_subcommand("spsym-audit", "maximum-set strategy audit"));
    auto* linear_family =
        add_common(app.add_subcommand("linear-family", "4-node-path strategy family audit"));
    linear_family->add_option("--r", r, "even-run mix weight");
    linear_family->add_option("--r1", r1, "full-run mix weight");
    auto* components =
        add_common(app.add_subcommand("components", "availability component statistics"));
    components->add_option("--samples", samples, "Monte Carlo samples");
    auto* mrf_audit =
        add_common(app.add_subcommand("mrf-audit", "state-model invariance audit"));
    auto* simulate = add_common(app.add_subcommand("simulate", "Monte Carlo market rounds"));
    simulate->add_option("--setting", setting, "1 = network-wide state, 2 = binary per node");
    simulate->add_option("--rounds", rounds, "rounds to simulate");
    auto* efficiency =
        add_common(app.add_subcommand("efficiency", "equilibrium-vs-collusion welfare curve"));
    efficiency->add_option("--m-list", m_list, "comma-separated demand levels");
    efficiency->add_option("--rounds", rounds, "rounds per demand level");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pricing->parsed()) return cmd_pricing(opts);
        if (mean_valid->parsed()) return cmd_mean_valid(opts);
        if (audit_ne->parsed()) return cmd_audit_ne(opts);
        if (spsym_audit->parsed()) return cmd_spsym_audit(opts);
        if (linear_family->parsed()) return cmd_linear_family(opts, r, r1);
        if (components->parsed()) return cmd_components(opts, samples);
        if (mrf_audit->parsed()) return cmd_mrf_audit(opts);
        if (simulate->parsed()) return cmd_simulate(opts, setting, rounds);
        if (efficiency->parsed()) return cmd_efficiency(opts, m_list, rounds);
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
