#include "oligo/market.hpp"

#include <algorithm>
#include <cmath>

namespace oligo {

DemandModel DemandModel::fixed_demand(int m) {
    if (m < 1) throw invalid_params("fixed demand must be >= 1");
    DemandModel d;
    d.fixed = true;
    d.kappa.assign(m, 0.0);
    d.kappa[m - 1] = 1.0;
    return d;
}

DemandModel DemandModel::random_demand(std::vector<double> pmf_from_one) {
    DemandModel d;
    d.fixed = false;
    d.kappa = std::move(pmf_from_one);
    d.validate();
    return d;
}

int DemandModel::fixed_m() const {
    if (!fixed) throw invalid_params("demand model is not fixed");
    return static_cast<int>(kappa.size());
}

void DemandModel::validate() const {
    if (kappa.empty()) throw invalid_params("empty demand pmf");
    double total = 0;
    for (double k : kappa) {
        if (k < 0) throw invalid_params("negative demand probability");
        total += k;
    }
    if (std::abs(total - 1.0) > 1e-12) throw invalid_params("demand pmf does not sum to 1");
}

PenaltyFamily PenaltyFamily::additive_cubic() {
    PenaltyFamily fam;
    fam.kind = "additive-cubic";
    fam.g = [](double p, int i) { return p - static_cast<double>(i) * i * i; };
    fam.f = [](double x, int i) { return x + static_cast<double>(i) * i * i; };
    return fam;
}

PenaltyFamily PenaltyFamily::quadratic_cubic() {
    PenaltyFamily fam;
    fam.kind = "quadratic-cubic";
    fam.g = [](double p, int i) { return p * p - static_cast<double>(i) * i * i; };
    fam.f = [](double x, int i) { return std::sqrt(x + static_cast<double>(i) * i * i); };
    return fam;
}

PenaltyFamily PenaltyFamily::identity() {
    PenaltyFamily fam;
    fam.kind = "identity";
    fam.g = [](double p, int) { return p; };
    fam.f = [](double x, int) { return x; };
    return fam;
}

PenaltyFamily PenaltyFamily::by_name(const std::string& name) {
    if (name == "additive-cubic") return additive_cubic();
    if (name == "quadratic-cubic") return quadratic_cubic();
    if (name == "identity") return identity();
    throw invalid_params("unknown penalty family: " + name);
}

void validate_market(const MarketParams& params, const PenaltyFamily& family) {
    if (params.l < 2) throw invalid_params("need at least two sellers");
    if (params.n < 1) throw invalid_params("need at least one quality state");
    params.demand.validate();
    if (!std::isfinite(params.v)) throw invalid_params("penalty cap must be finite");
    if (params.c < 0) throw invalid_params("negative cost");
    for (int j = 1; j <= params.n; ++j) {
        if (family.f(params.v, j) <= params.c)
            throw invalid_params("no profitable sale: f_j(v) <= c at state " + std::to_string(j));
    }
}

namespace {

// P(Bin(trials, x) >= m)
double binomial_tail(int trials, int m, double x) {
    if (m <= 0) return 1.0;
    if (m > trials) return 0.0;
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double log_term = std::lgamma(trials + 1.0) - std::lgamma(m + 1.0) -
                      std::lgamma(trials - m + 1.0) + m * std::log(x) +
                      (trials - m) * std::log1p(-x);
    double term = std::exp(log_term);
    double sum = term;
    const double ratio = x / (1.0 - x);
    for (int i = m; i < trials; ++i) {
        term *= ratio * (trials - i) / (i + 1.0);
        sum += term;
    }
    return std::min(sum, 1.0);
}

}  // namespace

double win_prob(double x, const MarketParams& params) {
    if (x < 0.0 || x > 1.0) throw invalid_params("win_prob argument outside [0,1]");
    const int trials = params.l - 1;
    double w = 0.0;
    for (int m = 1; m <= static_cast<int>(params.demand.kappa.size()); ++m) {
        double k = params.demand.kappa[m - 1];
        if (k > 0) w += k * binomial_tail(trials, m, x);
    }
    return w;
}

double win_prob_inverse(double y, const MarketParams& params) {
    const double w1 = win_prob(1.0, params);
    if (y < -1e-15 || y > w1 + 1e-15) throw invalid_params("win_prob_inverse argument out of range");
    if (y <= 0.0) return 0.0;
    if (y >= w1) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        if (win_prob(mid, params) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

PricingSolution solve_single_location(const MarketParams& params, const PenaltyFamily& family,
                                      const std::vector<double>& alpha) {
    validate_market(params, family);
    if (static_cast<int>(alpha.size()) != params.n)
        throw invalid_params("offer probabilities must have one entry per state");
    double total = 0;
    for (double a : alpha) {
        if (a < 0) throw invalid_params("negative offer probability");
        total += a;
    }
    if (total > 1.0 + 1e-12) throw invalid_params("offer probabilities exceed 1");

    const int n = params.n;
    PricingSolution sol;
    sol.p.resize(n);
    sol.L.resize(n);
    sol.U.resize(n);

    if (params.demand.is_fixed() && params.demand.fixed_m() >= params.l) {
        // More buyers than sellers at every node: every offer sells, so
        // everyone prices at the cap.
        sol.degenerate = true;
        for (int j = 1; j <= n; ++j) {
            sol.p[j - 1] = family.f(params.v, j);
            sol.L[j - 1] = params.v;
            sol.U[j - 1] = params.v;
        }
        return sol;
    }

    // tail(j) = sum_{k >= j} alpha_k
    auto tail = [&](int j) {
        double s = 0;
        for (int k = j; k <= n; ++k) s += alpha[k - 1];
        return s;
    };

    double U = params.v;
    for (int j = 1; j <= n; ++j) {
        const double wj = win_prob(std::min(tail(j), 1.0), params);
        const double wj1 = win_prob(std::min(tail(j + 1), 1.0), params);
        const double p = params.c + (family.f(U, j) - params.c) * (1.0 - wj);
        const double L = family.g((p - params.c) / (1.0 - wj1) + params.c, j);
        sol.U[j - 1] = U;
        sol.p[j - 1] = p;
        sol.L[j - 1] = L;
        U = L;
    }
    return sol;
}

double penalty_cdf(double x, int j, const PricingSolution& sol, const std::vector<double>& alpha,
                   const MarketParams& params, const PenaltyFamily& family) {
    if (j < 1 || j > sol.n()) throw invalid_params("state out of range");
    if (alpha[j - 1] <= 0) throw invalid_params("penalty distribution undefined: state never offered");
    const double L = sol.L[j - 1];
    const double U = sol.U[j - 1];
    if (x <= L) return 0.0;
    if (x >= U) return 1.0;
    const double fx = family.f(x, j);
    double y = (fx - sol.p[j - 1]) / (fx - params.c);
    y = std::clamp(y, 0.0, 1.0);
    double tail_above = 0;
    for (int k = j + 1; k <= sol.n(); ++k) tail_above += alpha[k - 1];
    double phi = (win_prob_inverse(y, params) - tail_above) / alpha[j - 1];
    return std::clamp(phi, 0.0, 1.0);
}

double sample_penalty(int j, const PricingSolution& sol, const std::vector<double>& alpha,
                      const MarketParams& params, const PenaltyFamily& family, double u) {
    if (j < 1 || j > sol.n()) throw invalid_params("state out of range");
    if (sol.degenerate) return params.v;
    if (alpha[j - 1] <= 0) throw invalid_params("penalty distribution undefined: state never offered");
    double tail_above = 0;
    for (int k = j + 1; k <= sol.n(); ++k) tail_above += alpha[k - 1];
    // Invert the CDF in closed form: phi_j(x) = u iff
    // (f_j(x) - p_j)/(f_j(x) - c) = w(tail_above + u * alpha_j).
    const double y = win_prob(std::min(tail_above + u * alpha[j - 1], 1.0), params);
    const double price = (sol.p[j - 1] - params.c * y) / (1.0 - y);
    double x = family.g(price, j);
    return std::clamp(x, sol.L[j - 1], sol.U[j - 1]);
}

double expected_payoff_at(double x, int j, const std::vector<double>& alpha,
                          const PricingSolution& sol, const MarketParams& params,
                          const PenaltyFamily& family) {
    const int n = sol.n();
    if (x < sol.L[n - 1] - 1e-12 || x > params.v + 1e-12)
        throw invalid_params("penalty outside the priced range");
    // Probability that one competitor undercuts x.
    double rho = 0;
    for (int k = 1; k <= n; ++k) {
        if (alpha[k - 1] <= 0) continue;
        if (x >= sol.U[k - 1])
            rho += alpha[k - 1];
        else if (x > sol.L[k - 1])
            rho += alpha[k - 1] * penalty_cdf(x, k, sol, alpha, params, family);
    }
    return (family.f(x, j) - params.c) * (1.0 - win_prob(std::min(rho, 1.0), params));
}

RatioMonotonicityReport check_ratio_monotonicity(const PenaltyFamily& family, int n, double c,
                                                 double v, int samples, std::mt19937_64& rng) {
    RatioMonotonicityReport report;
    if (n < 2) return report;  // nothing to compare
    auto unif = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    for (int s = 0; s < samples; ++s) {
        int i = 1 + static_cast<int>(unif() * (n - 1));
        int j = i + 1 + static_cast<int>(unif() * (n - i));
        j = std::min(j, n);
        const double floor = family.g(c, i);
        double y = floor + (v - floor) * unif();
        double x = y + (v - y) * unif();
        if (x <= y) continue;
        const double ry = (family.f(y, i) - c) / (family.f(y, j) - c);
        const double rx = (family.f(x, i) - c) / (family.f(x, j) - c);
        if (!(ry < rx + 1e-12)) {
            report.ok = false;
            report.witness = "ratio not increasing: i=" + std::to_string(i) +
                             " j=" + std::to_string(j) + " y=" + std::to_string(y) +
                             " x=" + std::to_string(x);
            return report;
        }
    }
    return report;
}

}  // namespace oligo
