#pragma once

#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace oligo {

struct invalid_params : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-node demand: either a fixed count of buyers or a pmf over counts.
struct DemandModel {
    // kappa[i] = P(demand == i+1). A fixed model is a degenerate pmf.
    std::vector<double> kappa;
    bool fixed = false;

    static DemandModel fixed_demand(int m);
    static DemandModel random_demand(std::vector<double> pmf_from_one);

    bool is_fixed() const { return fixed; }
    int fixed_m() const;
    int max_m() const { return static_cast<int>(kappa.size()); }
    void validate() const;
};

struct MarketParams {
    int l = 2;            // number of sellers competing at each node
    DemandModel demand;   // buyers per node
    int n = 1;            // number of non-zero quality states
    double v = 1.0;       // penalty cap
    double c = 0.0;       // per-sale transition cost
};

// Buyer-side penalty family: g maps price -> penalty at state i, f is its
// inverse (penalty -> price). Lower penalty is better for buyers; higher
// states give lower penalties at the same price.
struct PenaltyFamily {
    std::string kind;
    std::function<double(double, int)> g;
    std::function<double(double, int)> f;

    static PenaltyFamily additive_cubic();   // g_i(x) = x - i^3
    static PenaltyFamily quadratic_cubic();  // g_i(x) = x^2 - i^3
    static PenaltyFamily identity();         // n = 1, g(x) = x
    static PenaltyFamily by_name(const std::string& name);
};

void validate_market(const MarketParams& params, const PenaltyFamily& family);

// Mixed pricing equilibrium at a single node: state j prices on [L_j, U_j]
// with U_1 = v and U_{j+1} = L_j; p_j is the price whose payoff p_j - c is
// attained throughout the support. States are 1-based in the API; vectors
// are stored 0-based (index j-1).
struct PricingSolution {
    std::vector<double> p, L, U;
    bool degenerate = false;  // fixed demand >= sellers: everyone prices at the cap
    int n() const { return static_cast<int>(p.size()); }
};

// w(x): probability that at least `demand` of the other l-1 sellers undercut,
// when each is independently active with probability x.
double win_prob(double x, const MarketParams& params);
double win_prob_inverse(double y, const MarketParams& params);  // |w(x)-y| <= 1e-12

// Equilibrium pricing given per-state offer probabilities alpha_1..alpha_n.
PricingSolution solve_single_location(const MarketParams& params,
                                      const PenaltyFamily& family,
                                      const std::vector<double>& alpha);

// CDF of the state-j penalty distribution on [L_j, U_j].
double penalty_cdf(double x, int j, const PricingSolution& sol,
                   const std::vector<double>& alpha, const MarketParams& params,
                   const PenaltyFamily& family);

// Inverse-CDF sample for state j given a uniform draw u in [0,1].
double sample_penalty(int j, const PricingSolution& sol,
                      const std::vector<double>& alpha, const MarketParams& params,
                      const PenaltyFamily& family, double u);

// Expected payoff of pricing at penalty x with a state-j channel while the
// rest of the market plays `sol`. Constant and equal to p_j - c on [L_j, U_j].
double expected_payoff_at(double x, int j, const std::vector<double>& alpha,
                          const PricingSolution& sol, const MarketParams& params,
                          const PenaltyFamily& family);

// Sampled audit of the ratio-monotonicity property the pricing construction
// relies on: (f_i(y)-c)/(f_j(y)-c) < (f_i(x)-c)/(f_j(x)-c) for x > y, i < j.
struct RatioMonotonicityReport {
    bool ok = true;
    std::string witness;  // description of the first violation
};
RatioMonotonicityReport check_ratio_monotonicity(const PenaltyFamily& family, int n,
                                                 double c, double v, int samples,
                                                 std::mt19937_64& rng);

}  // namespace oligo
