#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dhedge/common.hpp"
#include "dhedge/kernel.hpp"
#include "dhedge/market_model.hpp"

namespace dhedge::mellin {

/// Vertical contour Re p = a0 for numeric inversion.
struct MellinLine {
    std::optional<double> a0;  // unset: midpoint -a/2 of the transform's strip
    double p_max = 0.0;        // 0: smallest P with |F(a0+iP)| < 1e-12 |F(a0)|, capped
    int nodes = 0;             // 0: 4 P / pi minimum; always doubled to convergence
    double p_max_cap = 5e4;
    double rel_tol = 1e-8;     // successive-doubling agreement, relative to max(1, |V|)
    double tail_tol = 1e-3;    // admissible truncation-tail estimate, relative to max(1, |V|)
    int max_doublings = 14;
};

/// A transform with its strip of convergence (open interval in Re p).
struct TransformFn {
    std::function<Complex(Complex)> eval;
    double strip_lo = 0.0;
    double strip_hi = 0.0;

    Complex operator()(Complex p) const { return eval(p); }
    bool in_strip(double re) const { return re > strip_lo && re < strip_hi; }
};

/// H(p) = integral over (0, inf) of x^{p-1} h(x) dx, evaluated in log space.
/// `kinks` are points in x where h is not smooth. Throws kStrip if Re p is
/// outside a declared strip or the integrand does not decay at truncation.
Complex mellin_forward(const std::function<double(double)>& h, Complex p,
                       std::optional<std::pair<double, double>> strip = std::nullopt,
                       std::span<const double> kinks = {});

/// E^{p+1} / (p (p+1)), the call payoff transform; kStrip outside (1-a, -1).
Complex payoff_transform_call(double strike, Complex p, double moment_bound = 4.0);

/// U(p) = integral of e^{p x} f(x) dx, from exponential moments:
/// (M(p+1) - m M(p)) (1 - e^{-r tau} m)/d + e^{-r tau} M(p).
/// kStrip unless Re p lies in [1-a, a-1].
Complex kernel_transform(const PricingKernel& kern, Complex p);

/// F_k(p) = F_0(p) * prod_{m<k} U_m(-p) for the call.
Complex product_transform(const MarketPath& path, int k, Complex p);

/// F_k as a TransformFn with strip (1-a, -1).
TransformFn product_transform_fn(const MarketPath& path, int k);

/// prod_{m<k} U_m(-p) with strip (1-a, a-1); its inverse is G_k.
TransformFn green_transform_fn(const MarketPath& path, int k);

struct Inversion {
    double value = 0.0;
    double p_max = 0.0;
    long intervals = 0;          // trapezoid intervals on [0, p_max]
    double change = 0.0;         // last doubling change
    double tail_estimate = 0.0;
};

/// (1 / 2 pi i) times the integral of F(p) x^{-p} along Re p = a0, by the
/// trapezoid rule on the upper half-line using conjugate symmetry.
double mellin_inverse(const TransformFn& f, const MellinLine& line, double x);

/// Batch inversion sharing the contour samples; diagnostics per point.
std::vector<Inversion> mellin_inverse(const TransformFn& f, const MellinLine& line,
                                      std::span<const double> xs);

/// V_k(s) by inverting F_k (call payoff only).
double price_mellin(const MarketPath& path, int k, double s, const MellinLine& line = {});
/// kUnsupportedPayoff unless the payoff is a call with the path's strike.
double price_mellin(const MarketPath& path, const Payoff& payoff, int k, double s,
                    const MellinLine& line = {});

/// G_k tabulated on a log-uniform grid in w = ln x. Built once, then
/// read-only; safe for concurrent readers.
class GreenFunction {
public:
    GreenFunction(const MarketPath& path, int k, const MellinLine& line = {}, int nodes = 4096);

    double operator()(double x) const;
    double at_log(double w) const;
    double log_lo() const { return interp_.y0(); }
    double log_hi() const { return interp_.y_back(); }
    const UniformCubic& table() const { return interp_; }

    /// Integral of G(x) / x dx over (0, inf).
    double mass() const;
    /// V_k(s) = integral of G(s/y) V_0(y) dy / y.
    double convolve(const Payoff& payoff, double s) const;

private:
    UniformCubic interp_;
};

/// Green-function route: builds G_k and convolves it with the payoff.
double green_price(const MarketPath& path, int k, const Payoff& payoff, double s,
                   const MellinLine& line = {});

}  // namespace dhedge::mellin
