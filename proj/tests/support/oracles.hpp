#pragma once

// Reference computations for the tests. Deliberately independent of the
// library's own quadrature and closed forms.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

namespace oracle {

inline double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double black_scholes(double s, double t, double e, double r, double sigma) {
    const double sd = sigma * std::sqrt(t);
    const double d1 = (std::log(s / e) + (r + 0.5 * sigma * sigma) * t) / sd;
    return s * normal_cdf(d1) - e * std::exp(-r * t) * normal_cdf(d1 - sd);
}

/// Composite 20-point Gauss-Legendre on [lo, hi] with `panels` equal pieces.
template <class F>
auto gauss(F&& f, double lo, double hi, int panels) {
    using R = decltype(f(lo));
    R total{};
    const double h = (hi - lo) / panels;
    for (int i = 0; i < panels; ++i) {
        const double a = lo + i * h;
        total += boost::math::quadrature::gauss<double, 20>::integrate(
            [&](double x) { return f(x); }, a, a + h);
    }
    return total;
}

/// Lognormal-model kernel written out from its definition.
struct Kernel {
    double mu_tau, var_tau, r_tau;

    double m() const { return std::exp(mu_tau + 0.5 * var_tau); }
    double d() const { return std::exp(2 * mu_tau + 2 * var_tau) - m() * m(); }
    double operator()(double x) const {
        const double disc = std::exp(-r_tau);
        const double u = normal_pdf(x, mu_tau, std::sqrt(var_tau));
        return ((std::exp(x) - m()) * (1.0 - disc * m()) / d() + disc) * u;
    }
    double lo() const { return mu_tau - 14.0 * std::sqrt(var_tau); }
    double hi() const { return mu_tau + 14.0 * std::sqrt(var_tau); }
};

}  // namespace oracle
