#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dhedge/interpolation.hpp"
#include "dhedge/market_model.hpp"

namespace dhedge {

/// Signed one-step pricing kernel
///   f(x) = ((e^x - m)(1 - e^{-r tau} m)/d + e^{-r tau}) u(x).
/// Not a probability density: it integrates to e^{-r tau} and may be negative.
class PricingKernel {
public:
    explicit PricingKernel(MarketStep step);

    const MarketStep& step() const { return step_; }
    double m() const { return moments_.m; }
    double d() const { return moments_.d; }
    double discount() const { return discount_; }
    /// (1 - e^{-r tau} m) / d, the weight of the covariance term.
    double tilt() const { return tilt_; }

    double operator()(double x) const;

    /// Integration range for x: mean +- 10 standard deviations of xi.
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }

private:
    MarketStep step_;
    StepMoments moments_;
    double discount_;
    double tilt_;
    double x_lo_;
    double x_hi_;
};

inline double kernel_eval(const PricingKernel& kern, double x) { return kern(x); }

/// How values beyond the grid ends are reconstructed.
enum class TailRule {
    kCall,    // 0 below; s - E * discount above
    kAffine,  // straight line in s through the two outermost nodes
};

enum class PayoffKind { kCall, kCustom };

/// Terminal claim V_0 with its non-smooth points (used as quadrature breaks).
struct Payoff {
    PayoffKind kind = PayoffKind::kCustom;
    std::function<double(double)> value;
    std::vector<double> kinks;
    TailRule tail = TailRule::kAffine;
    double strike = 0.0;  // meaningful for kCall

    double operator()(double s) const { return value(s); }

    static Payoff call(double strike);
    static Payoff constant(double c);
    static Payoff linear();
};

/// Log-uniform grid layout in ln(s/E).
struct GridSpec {
    int nodes = 2048;
    double half_width = 0.0;  // L; 0 picks max(8 sigma sqrt(T), 4)
    int panels = 4096;        // initial Simpson panels per node integral
};

/// Option values V_k on a log-uniform price grid.
class PriceGrid {
public:
    PriceGrid(double strike, double log_lo, double log_hi, std::vector<double> values,
              int step_index, TailRule tail, double discount);

    std::size_t size() const { return interp_.size(); }
    double strike() const { return strike_; }
    double log_lo() const { return log_lo_; }
    double log_hi() const { return log_hi_; }
    double log_spacing() const { return interp_.spacing(); }
    int step_index() const { return step_index_; }
    TailRule tail() const { return tail_; }
    /// Accumulated discount from maturity to this step.
    double discount() const { return discount_; }

    double s(std::size_t i) const;
    double value(std::size_t i) const { return interp_.values()[i]; }
    std::span<const double> values() const { return interp_.values(); }
    const UniformCubic& interpolant() const { return interp_; }

    /// V at log-moneyness y = ln(s/E), with tail extrapolation off the grid.
    double at_log(double y) const;
    /// V at price s > 0.
    double operator()(double s) const;
    /// Extrapolated value for y outside [log_lo, log_hi].
    double tail_value(double y) const;

    /// Grid with the same layout and new values.
    PriceGrid with_values(std::vector<double> values, int step_index, double discount) const;

private:
    double strike_;
    double log_lo_;
    double log_hi_;
    int step_index_;
    TailRule tail_;
    double discount_;
    UniformCubic interp_;
};

/// Samples a payoff onto a fresh grid (step index 0).
PriceGrid sample_payoff(const Payoff& payoff, double strike, const GridSpec& spec,
                        double half_width);

/// V_{k+1}(s_i) = integral of V_k(s_i e^x) f_k(x) dx at every grid node.
/// Throws kNumeric if panel doubling fails to reach 1e-9 relative agreement.
PriceGrid backward_step(const PriceGrid& v, const PricingKernel& kern, int panels = 4096);

/// First step taken directly on the payoff function, so its kinks are
/// integrated exactly instead of through the grid interpolant.
PriceGrid backward_step(const Payoff& payoff, const PriceGrid& layout, const PricingKernel& kern,
                        int panels = 4096);

/// Grid half-width used for a path: max(8 sqrt(total log variance), 4).
double default_half_width(const MarketPath& path);

/// [V_0, V_1, ..., V_n] by repeated backward steps.
std::vector<PriceGrid> price_recursive(const MarketPath& path, const Payoff& payoff,
                                       const GridSpec& spec = {});

/// Only the final grid, without keeping intermediates.
PriceGrid price_recursive_final(const MarketPath& path, const Payoff& payoff, int k,
                                const GridSpec& spec = {});

/// Delta = cov[V(s e^xi), e^xi] / (s d), covariance by quadrature against u.
double min_variance_delta(const PriceGrid& v, double s, const PricingKernel& kern);
double min_variance_delta(const Payoff& v, double s, const PricingKernel& kern);

/// One backward step evaluated at a single price: the integral of
/// V(s e^x) f(x) dx without interpolating the result.
double backward_value(const PriceGrid& v, double s, const PricingKernel& kern);
double backward_value(const Payoff& v, double s, const PricingKernel& kern);

/// V_k at the given prices: grids up to V_{k-1}, then a direct last step at
/// each spot.
std::vector<double> price_recursive_at(const MarketPath& path, const Payoff& payoff, int k,
                                       std::span<const double> spots, const GridSpec& spec = {});

inline double portfolio_value(double v_at_s, double delta, double s) { return v_at_s - delta * s; }

}  // namespace dhedge
