#include "dhedge/lognormal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace dhedge::lognormal {

namespace {

// Signed log-space mixture weight C(n,k) M1^{n-k} M2^k.
struct Weight {
    double log_abs = 0.0;
    int sign = 0;  // 0 for a vanishing term
};

Weight mixture_weight(int n, int k, const Coefficients& c) {
    auto log_pow = [](double base, int e, int& sign) -> double {
        if (e == 0) return 0.0;
        if (base == 0.0) {
            sign = 0;
            return 0.0;
        }
        if (base < 0.0 && e % 2 == 1) sign = -sign;
        return e * std::log(std::abs(base));
    };
    Weight w;
    w.sign = 1;
    const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    w.log_abs = lc + log_pow(c.m1, n - k, w.sign) + log_pow(c.m2, k, w.sign);
    return w;
}

}  // namespace

MarketStep Params::step(double moment_bound) const {
    validate(*this);
    return MarketStep{r, tau, ReturnDistribution::lognormal(mu * tau, sigma * sigma * tau, moment_bound)};
}

MarketPath Params::path(double moment_bound) const {
    return MarketPath::uniform(step(moment_bound), n, strike);
}

void validate(const Params& p) {
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) fail(ErrorKind::kValidation, "sigma must be >= 0");
    if (!(p.tau > 0.0) || !std::isfinite(p.tau)) fail(ErrorKind::kValidation, "tau must be positive");
    if (!(p.strike > 0.0)) fail(ErrorKind::kValidation, "strike must be positive");
    if (p.n < 0) fail(ErrorKind::kValidation, "n must be >= 0");
    if (!std::isfinite(p.mu) || !std::isfinite(p.r)) fail(ErrorKind::kValidation, "mu and r must be finite");
}

Moments closed_moments(const Params& p) {
    const double v = p.sigma * p.sigma * p.tau;
    Moments out;
    out.m = std::exp(p.mu * p.tau + 0.5 * v);
    out.d = std::exp(2.0 * p.mu * p.tau + v) * std::expm1(v);
    return out;
}

Coefficients coefficients(const Params& p) {
    validate(p);
    const double v = p.sigma * p.sigma * p.tau;
    if (v == 0.0) fail(ErrorKind::kDomain, "M1/M2 undefined for sigma = 0 (zero denominator)");
    // Denominator e^{mu tau + 3v/2} - e^{mu tau + v/2} = e^{mu tau + v/2} expm1(v).
    const double denom = std::exp(p.mu * p.tau + 0.5 * v) * std::expm1(v);
    const double m2 = -std::expm1((p.mu - p.r) * p.tau + 0.5 * v) / denom;
    return {std::exp(-p.r * p.tau) - m2, m2};
}

Complex u_closed(const Params& p, Complex z) {
    const auto c = coefficients(p);
    const double v = p.sigma * p.sigma * p.tau;
    return std::exp(p.mu * p.tau * z + 0.5 * v * z * z) * (c.m1 + c.m2 * std::exp(z * v));
}

double green_closed(const Params& p, double x) {
    if (!(x > 0.0)) fail(ErrorKind::kDomain, "green_closed needs x > 0");
    const auto c = coefficients(p);
    const double v = p.sigma * p.sigma * p.tau;
    const double var = p.n * v;
    const double lx = std::log(x);
    double sum = 0.0;
    for (int k = 0; k <= p.n; ++k) {
        const Weight w = mixture_weight(p.n, k, c);
        if (w.sign == 0) continue;
        const double z = lx + p.n * p.mu * p.tau + k * v;
        const double log_term = w.log_abs - 0.5 * z * z / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
        sum += w.sign * std::exp(log_term);
    }
    return sum;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double price_closed(const Params& p, double s) {
    if (!(s > 0.0)) fail(ErrorKind::kDomain, "price_closed needs s > 0");
    validate(p);
    if (p.n == 0) return std::max(s - p.strike, 0.0);
    const auto c = coefficients(p);
    const double v = p.sigma * p.sigma * p.tau;
    const double var = p.n * v;
    const double sd = std::sqrt(var);
    const double b = std::log(s / p.strike);
    double sum = 0.0;
    for (int k = 0; k <= p.n; ++k) {
        const Weight w = mixture_weight(p.n, k, c);
        if (w.sign == 0) continue;
        const double mean = p.n * p.mu * p.tau + k * v;
        const double d2 = (b + mean) / sd;
        const double d1 = d2 + sd;
        // s e^{mean + var/2} N(d1) - E N(d2), weight folded into the exponent.
        const double t1 = std::exp(w.log_abs + std::log(s) + mean + 0.5 * var) * normal_cdf(d1);
        const double t2 = std::exp(w.log_abs + std::log(p.strike)) * normal_cdf(d2);
        sum += w.sign * (t1 - t2);
    }
    return sum;
}

double price_no_jacobian(const Params& p, double s) {
    if (!(s > 0.0)) fail(ErrorKind::kDomain, "price_no_jacobian needs s > 0");
    validate(p);
    if (p.n == 0) return std::max(s - p.strike, 0.0);
    const auto c = coefficients(p);
    const double v = p.sigma * p.sigma * p.tau;
    const double var = p.n * v;
    const double sd = std::sqrt(var);
    const double b = std::log(s / p.strike);
    double sum = 0.0;
    for (int k = 0; k <= p.n; ++k) {
        const Weight w = mixture_weight(p.n, k, c);
        if (w.sign == 0) continue;
        const double mean = p.n * p.mu * p.tau + k * v;
        // With z = ln y ~ N(-mean, var): s N((b+mean)/sd) - E e^{-mean+var/2} N((b+mean-var)/sd).
        const double t1 = s * normal_cdf((b + mean) / sd);
        const double t2 = p.strike * std::exp(-mean + 0.5 * var) * normal_cdf((b + mean - var) / sd);
        sum += w.sign * std::exp(w.log_abs) * (t1 - t2);
    }
    return sum;
}

double black_scholes(double s, double t, double strike, double r, double sigma) {
    if (!(s > 0.0) || !(t >= 0.0)) fail(ErrorKind::kDomain, "black_scholes needs s > 0 and t >= 0");
    if (t == 0.0) return std::max(s - strike, 0.0);
    const double disc = strike * std::exp(-r * t);
    if (sigma == 0.0) return std::max(s - disc, 0.0);
    const double sd = sigma * std::sqrt(t);
    const double d1 = (std::log(s / strike) + (r + 0.5 * sigma * sigma) * t) / sd;
    const double d2 = d1 - sd;
    return s * normal_cdf(d1) - disc * normal_cdf(d2);
}

}  // namespace dhedge::lognormal
