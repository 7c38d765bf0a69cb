#pragma once

#include <functional>
#include <vector>

#include "dhedge/lognormal.hpp"

namespace dhedge {

/// Least-squares fit of V(t, s; tau) ~ B_0 + tau B_1 + ... + tau^l B_l.
struct ExpansionEstimate {
    double t = 0.0;
    double s = 0.0;
    std::vector<double> coefficients;  // B_0..B_l
    std::vector<double> tau_grid;
    std::vector<double> values;        // V at each tau
    std::vector<double> residuals;     // V - fit at each tau
    double condition_number = 0.0;
};

/// `price_at_tau(tau)` must return V(t, s) for hedging period tau. Needs at
/// least l + 2 distinct taus, each dividing t into whole steps. Throws kFit
/// if the design matrix condition number exceeds 1e10.
ExpansionEstimate estimate_expansion(const std::function<double(double)>& price_at_tau, double t,
                                     double s, int order, const std::vector<double>& tau_grid);

/// t/n for n in {16, 32, 64, 128, 256}.
std::vector<double> default_tau_grid(double t);

struct ConvergenceRow {
    int n = 0;
    double tau = 0.0;
    double value = 0.0;
    double error = 0.0;        // |V - C_BS|
    double local_order = 0.0;  // against the previous row; NaN on the first
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double reference = 0.0;  // Black-Scholes value
    double order = 0.0;      // log-log slope of error against tau; NaN if all errors vanish
    bool monotone = true;    // errors strictly decreasing in n
    double final_relative_error = 0.0;
};

/// Discrete-hedging lognormal price against Black-Scholes as tau = T/n -> 0.
/// `base` supplies mu, sigma, r and strike; its tau and n are overridden.
ConvergenceReport bs_limit_check(const lognormal::Params& base, double maturity, double s,
                                 const std::vector<int>& ns);

}  // namespace dhedge
