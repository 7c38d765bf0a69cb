#pragma once

#include "dhedge/common.hpp"
#include "dhedge/market_model.hpp"

namespace dhedge::lognormal {

/// Gaussian log returns with mean mu*tau and variance sigma^2*tau per step,
/// constant rate r, n steps to maturity.
struct Params {
    double mu = 0.0;
    double sigma = 0.0;
    double tau = 0.0;
    double r = 0.0;
    double strike = 0.0;
    int n = 1;

    double maturity() const { return tau * n; }
    MarketStep step(double moment_bound = 4.0) const;
    MarketPath path(double moment_bound = 4.0) const;
};

/// Throws kValidation for sigma < 0, tau <= 0, strike <= 0 or n < 0.
void validate(const Params& p);

struct Moments {
    double m = 0.0;
    double d = 0.0;
};

/// m = e^{mu tau + sigma^2 tau / 2}, d = e^{2 mu tau + sigma^2 tau}(e^{sigma^2 tau} - 1).
Moments closed_moments(const Params& p);

/// Mixing weights of the kernel transform U(p) = M(p) (M1 + M2 e^{p sigma^2 tau}).
/// M1 + M2 = e^{-r tau}; both are non-negative exactly on the feasible rate
/// interval [mu + sigma^2/2, mu + 3 sigma^2/2].
struct Coefficients {
    double m1 = 0.0;
    double m2 = 0.0;
};

/// kDomain error when sigma = 0 (the defining quotients degenerate).
Coefficients coefficients(const Params& p);

/// U(p) = e^{mu tau p + sigma^2 tau p^2 / 2} (M1 + M2 e^{p sigma^2 tau}).
Complex u_closed(const Params& p, Complex z);

/// Gaussian-mixture Green function
///   G_n(x) = sum_k C(n,k) M1^{n-k} M2^k N(-ln x; n mu tau + k sigma^2 tau, n sigma^2 tau).
/// Binomial weights are formed in log space, so n in the thousands is fine.
double green_closed(const Params& p, double x);

/// Discrete-hedging call value V_n(s): the Green function convolved with the
/// call payoff, reduced term by term to normal CDFs.
double price_closed(const Params& p, double s);

/// Integral of G_n(y)(s/y - E) dy over (0, s/E), i.e. the convolution
/// without the 1/y Jacobian of the y = s/x substitution. Not a price; it
/// exists to quantify how far that form sits from price_closed.
double price_no_jacobian(const Params& p, double s);

/// Standard normal CDF.
double normal_cdf(double x);

/// Black-Scholes call value with time t to maturity.
double black_scholes(double s, double t, double strike, double r, double sigma);

}  // namespace dhedge::lognormal
