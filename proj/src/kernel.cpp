#include "dhedge/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dhedge/quadrature.hpp"

namespace dhedge {

namespace {

constexpr double kStepRelTol = 1e-9;
constexpr int kMaxDoublings = 4;

}  // namespace

PricingKernel::PricingKernel(MarketStep step) : step_(std::move(step)) {
    validate(step_);
    moments_ = step_moments(step_.dist);
    discount_ = step_.discount();
    tilt_ = (1.0 - discount_ * moments_.m) / moments_.d;
    x_lo_ = step_.dist.mean() - 10.0 * step_.dist.stddev();
    x_hi_ = step_.dist.mean() + 10.0 * step_.dist.stddev();
}

double PricingKernel::operator()(double x) const {
    return ((std::exp(x) - moments_.m) * tilt_ + discount_) * step_.dist.density(x);
}

Payoff Payoff::call(double strike) {
    if (!(strike > 0.0)) fail(ErrorKind::kValidation, "call strike must be positive");
    Payoff p;
    p.kind = PayoffKind::kCall;
    p.value = [strike](double s) { return std::max(s - strike, 0.0); };
    p.kinks = {strike};
    p.tail = TailRule::kCall;
    p.strike = strike;
    return p;
}

Payoff Payoff::constant(double c) {
    Payoff p;
    p.value = [c](double) { return c; };
    return p;
}

Payoff Payoff::linear() {
    Payoff p;
    p.value = [](double s) { return s; };
    return p;
}

PriceGrid::PriceGrid(double strike, double log_lo, double log_hi, std::vector<double> values,
                     int step_index, TailRule tail, double discount)
    : strike_(strike),
      log_lo_(log_lo),
      log_hi_(log_hi),
      step_index_(step_index),
      tail_(tail),
      discount_(discount) {
    if (!(strike > 0.0)) fail(ErrorKind::kValidation, "grid strike must be positive");
    if (!(log_hi > log_lo)) fail(ErrorKind::kValidation, "grid bounds must satisfy log_lo < log_hi");
    const std::size_t n = values.size();
    if (n < 4) fail(ErrorKind::kValidation, "price grid needs at least 4 nodes");
    const double h = (log_hi - log_lo) / static_cast<double>(n - 1);
    interp_ = UniformCubic(log_lo, h, std::move(values), UniformCubic::Slopes::kMonotone);
}

double PriceGrid::s(std::size_t i) const {
    return strike_ * std::exp(log_lo_ + interp_.spacing() * static_cast<double>(i));
}

double PriceGrid::tail_value(double y) const {
    const std::size_t n = size();
    const auto v = interp_.values();
    const double s_at = strike_ * std::exp(y);
    if (tail_ == TailRule::kCall) {
        return y < log_lo_ ? 0.0 : s_at - strike_ * discount_;
    }
    const bool low = y < log_lo_;
    const std::size_t a = low ? 0 : n - 2;
    const double sa = s(a);
    const double sb = s(a + 1);
    const double slope = (v[a + 1] - v[a]) / (sb - sa);
    return v[a] + slope * (s_at - sa);
}

double PriceGrid::at_log(double y) const {
    if (y < log_lo_ || y > log_hi_) return tail_value(y);
    return interp_(y);
}

double PriceGrid::operator()(double s) const {
    if (!(s > 0.0)) {
        return tail_ == TailRule::kCall ? 0.0 : tail_value(-std::numeric_limits<double>::infinity());
    }
    return at_log(std::log(s / strike_));
}

PriceGrid PriceGrid::with_values(std::vector<double> values, int step_index, double discount) const {
    return PriceGrid(strike_, log_lo_, log_hi_, std::move(values), step_index, tail_, discount);
}

PriceGrid sample_payoff(const Payoff& payoff, double strike, const GridSpec& spec,
                        double half_width) {
    if (spec.nodes < 4) fail(ErrorKind::kValidation, "grid needs at least 4 nodes");
    std::vector<double> v(static_cast<std::size_t>(spec.nodes));
    const double h = 2.0 * half_width / (spec.nodes - 1);
    for (int i = 0; i < spec.nodes; ++i) {
        v[static_cast<std::size_t>(i)] = payoff(strike * std::exp(-half_width + h * i));
    }
    return PriceGrid(strike, -half_width, half_width, std::move(v), 0, payoff.tail, 1.0);
}

namespace {

// Quadrature nodes in x with the interpolation cell and Hermite basis
// precomputed; node positions relative to a grid node are the same for
// every grid node because the grid is log-uniform.
struct StepTable {
    std::vector<double> x;
    std::vector<long> cell_offset;
    std::vector<double> b00, b10, b01, b11;
    std::vector<double> w_fine, w_coarse;
};

StepTable build_table(const PricingKernel& kern, double h, int coarse_panels) {
    std::vector<double> cands;
    const long j_lo = static_cast<long>(std::ceil(kern.x_lo() / h));
    const long j_hi = static_cast<long>(std::floor(kern.x_hi() / h));
    for (long j = j_lo; j <= j_hi; ++j) cands.push_back(static_cast<double>(j) * h);
    const auto breaks = quad::breakpoints(kern.x_lo(), kern.x_hi(), cands);
    const quad::NestedRule rule = quad::nested_simpson(breaks, coarse_panels);

    StepTable t;
    const std::size_t m = rule.nodes.size();
    t.x = rule.nodes;
    t.cell_offset.resize(m);
    t.b00.resize(m);
    t.b10.resize(m);
    t.b01.resize(m);
    t.b11.resize(m);
    t.w_fine.resize(m);
    t.w_coarse.resize(m);
    for (std::size_t l = 0; l < m; ++l) {
        const double q = rule.nodes[l] / h;
        double jq = std::floor(q);
        double frac = q - jq;
        // Snap nodes that sit on a cell boundary up to rounding.
        if (frac > 1.0 - 1e-12) {
            jq += 1.0;
            frac = 0.0;
        } else if (frac < 1e-12) {
            frac = 0.0;
        }
        const double t2 = frac * frac;
        const double t3 = t2 * frac;
        t.cell_offset[l] = static_cast<long>(jq);
        t.b00[l] = 2 * t3 - 3 * t2 + 1;
        t.b10[l] = (t3 - 2 * t2 + frac) * h;
        t.b01[l] = -2 * t3 + 3 * t2;
        t.b11[l] = (t3 - t2) * h;
        const double fx = kern(rule.nodes[l]);
        t.w_fine[l] = rule.fine[l] * fx;
        t.w_coarse[l] = rule.coarse[l] * fx;
    }
    return t;
}

[[noreturn]] void report_divergence(double s, double fine, double coarse, int panels) {
    std::ostringstream msg;
    msg << "backward_step quadrature did not converge at s = " << s << " with " << panels
        << " panels: fine = " << fine << ", coarse = " << coarse;
    fail(ErrorKind::kNumeric, msg.str());
}

}  // namespace

PriceGrid backward_step(const PriceGrid& v, const PricingKernel& kern, int panels) {
    const std::size_t n = v.size();
    const double h = v.log_spacing();
    const auto values = v.interpolant().values();
    const auto slopes = v.interpolant().slopes();
    const double abs_tol = 1e-13 * v.strike();

    std::vector<double> out(n);
    std::vector<char> ok(n, 0);
    for (int level = 0; level <= kMaxDoublings; ++level) {
        const StepTable t = build_table(kern, h, panels << level);
        const std::size_t m = t.x.size();
        parallel_for(n, [&](std::size_t i) {
            if (ok[i]) return;
            double fine = 0.0;
            double coarse = 0.0;
            const long base = static_cast<long>(i);
            const double yi = v.log_lo() + h * static_cast<double>(i);
            for (std::size_t l = 0; l < m; ++l) {
                const long c = base + t.cell_offset[l];
                double val;
                if (c >= 0 && c + 1 < static_cast<long>(n)) {
                    const auto cu = static_cast<std::size_t>(c);
                    val = t.b00[l] * values[cu] + t.b10[l] * slopes[cu] +
                          t.b01[l] * values[cu + 1] + t.b11[l] * slopes[cu + 1];
                } else if (c == static_cast<long>(n) - 1 && t.b00[l] == 1.0) {
                    val = values[n - 1];
                } else {
                    val = v.at_log(yi + t.x[l]);
                }
                fine += t.w_fine[l] * val;
                coarse += t.w_coarse[l] * val;
            }
            out[i] = fine;
            if (std::abs(fine - coarse) <= kStepRelTol * std::abs(fine) + abs_tol) {
                ok[i] = 1;
            } else if (level == kMaxDoublings) {
                report_divergence(v.s(i), fine, coarse, 2 * (panels << level));
            }
        });
        if (std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; })) break;
    }
    return v.with_values(std::move(out), v.step_index() + 1, v.discount() * kern.discount());
}

PriceGrid backward_step(const Payoff& payoff, const PriceGrid& layout, const PricingKernel& kern,
                        int panels) {
    const std::size_t n = layout.size();
    std::vector<double> out(n);
    const double abs_tol = 1e-13 * layout.strike();
    parallel_for(n, [&](std::size_t i) {
        const double s = layout.s(i);
        std::vector<double> cands;
        cands.reserve(payoff.kinks.size());
        for (double k : payoff.kinks) {
            if (k > 0.0) cands.push_back(std::log(k / s));
        }
        const auto breaks = quad::breakpoints(kern.x_lo(), kern.x_hi(), cands);
        const auto est = quad::simpson_doubling(
            [&](double x) { return payoff(s * std::exp(x)) * kern(x); }, breaks, panels,
            kStepRelTol, abs_tol, kMaxDoublings);
        out[i] = est.value;
    });
    return layout.with_values(std::move(out), 1, kern.discount());
}

double default_half_width(const MarketPath& path) {
    return std::max(8.0 * std::sqrt(path.log_variance(path.size())), 4.0);
}

namespace {

PriceGrid initial_grid(const MarketPath& path, const Payoff& payoff, const GridSpec& spec) {
    const double hw = spec.half_width > 0.0 ? spec.half_width : default_half_width(path);
    return sample_payoff(payoff, path.strike(), spec, hw);
}

}  // namespace

std::vector<PriceGrid> price_recursive(const MarketPath& path, const Payoff& payoff,
                                       const GridSpec& spec) {
    std::vector<PriceGrid> grids;
    grids.reserve(static_cast<std::size_t>(path.size()) + 1);
    grids.push_back(initial_grid(path, payoff, spec));
    for (int k = 0; k < path.size(); ++k) {
        const PricingKernel kern(path.step(k));
        if (k == 0) {
            grids.push_back(backward_step(payoff, grids.front(), kern, spec.panels));
        } else {
            grids.push_back(backward_step(grids.back(), kern, spec.panels));
        }
    }
    return grids;
}

PriceGrid price_recursive_final(const MarketPath& path, const Payoff& payoff, int k,
                                const GridSpec& spec) {
    if (k < 0 || k > path.size()) fail(ErrorKind::kValidation, "step index out of range");
    PriceGrid grid = initial_grid(path, payoff, spec);
    for (int m = 0; m < k; ++m) {
        const PricingKernel kern(path.step(m));
        grid = m == 0 ? backward_step(payoff, grid, kern, spec.panels)
                      : backward_step(grid, kern, spec.panels);
    }
    return grid;
}

namespace {

// Quadrature breaks in x for integrating V(s e^x): grid nodes or payoff kinks.
std::vector<double> grid_breaks(const PriceGrid& v, double s, const PricingKernel& kern) {
    const double y = std::log(s / v.strike());
    std::vector<double> cands;
    const double h = v.log_spacing();
    const long j_lo = static_cast<long>(std::ceil((y + kern.x_lo() - v.log_lo()) / h));
    const long j_hi = static_cast<long>(std::floor((y + kern.x_hi() - v.log_lo()) / h));
    for (long j = std::max(0L, j_lo); j <= std::min<long>(j_hi, static_cast<long>(v.size()) - 1); ++j) {
        cands.push_back(v.log_lo() + h * static_cast<double>(j) - y);
    }
    return quad::breakpoints(kern.x_lo(), kern.x_hi(), cands);
}

std::vector<double> payoff_breaks(const Payoff& v, double s, const PricingKernel& kern) {
    std::vector<double> cands;
    for (double k : v.kinks) {
        if (k > 0.0) cands.push_back(std::log(k / s));
    }
    return quad::breakpoints(kern.x_lo(), kern.x_hi(), cands);
}

double delta_from_cov(const std::function<double(double)>& v, std::span<const double> breaks,
                      double s, const PricingKernel& kern) {
    const double m = kern.m();
    const auto& dist = kern.step().dist;
    const double abs_tol = 1e-13 * (std::abs(v(s)) + s);
    const auto est = quad::simpson_doubling(
        [&](double x) { return v(s * std::exp(x)) * (std::exp(x) - m) * dist.density(x); },
        breaks, 4096, kStepRelTol, abs_tol, kMaxDoublings);
    return est.value / (s * kern.d());
}

double step_value(const std::function<double(double)>& v, std::span<const double> breaks, double s,
                  const PricingKernel& kern, double strike) {
    const double abs_tol = 1e-13 * strike;
    const auto est = quad::simpson_doubling([&](double x) { return v(s * std::exp(x)) * kern(x); },
                                            breaks, 4096, kStepRelTol, abs_tol, kMaxDoublings);
    return est.value;
}

void check_spot(const PriceGrid& v, double s, const char* what) {
    if (!(s > 0.0)) fail(ErrorKind::kDomain, std::string(what) + " needs s > 0");
    const double y = std::log(s / v.strike());
    if (y < v.log_lo() || y > v.log_hi()) fail(ErrorKind::kDomain, std::string(what) + ": s outside grid range");
}

}  // namespace

double min_variance_delta(const PriceGrid& v, double s, const PricingKernel& kern) {
    check_spot(v, s, "delta");
    return delta_from_cov([&v](double z) { return v(z); }, grid_breaks(v, s, kern), s, kern);
}

double min_variance_delta(const Payoff& v, double s, const PricingKernel& kern) {
    if (!(s > 0.0)) fail(ErrorKind::kDomain, "delta needs s > 0");
    return delta_from_cov([&v](double z) { return v(z); }, payoff_breaks(v, s, kern), s, kern);
}

double backward_value(const PriceGrid& v, double s, const PricingKernel& kern) {
    check_spot(v, s, "backward_value");
    return step_value([&v](double z) { return v(z); }, grid_breaks(v, s, kern), s, kern, v.strike());
}

double backward_value(const Payoff& v, double s, const PricingKernel& kern) {
    if (!(s > 0.0)) fail(ErrorKind::kDomain, "backward_value needs s > 0");
    const double scale = v.strike > 0.0 ? v.strike : std::max(std::abs(v(s)), s);
    return step_value([&v](double z) { return v(z); }, payoff_breaks(v, s, kern), s, kern, scale);
}

std::vector<double> price_recursive_at(const MarketPath& path, const Payoff& payoff, int k,
                                       std::span<const double> spots, const GridSpec& spec) {
    if (k < 0 || k > path.size()) fail(ErrorKind::kValidation, "step index out of range");
    std::vector<double> out(spots.size());
    if (k == 0) {
        for (std::size_t i = 0; i < spots.size(); ++i) out[i] = payoff(spots[i]);
        return out;
    }
    const PricingKernel kern(path.step(k - 1));
    if (k == 1) {
        for (std::size_t i = 0; i < spots.size(); ++i) out[i] = backward_value(payoff, spots[i], kern);
        return out;
    }
    const PriceGrid prev = price_recursive_final(path, payoff, k - 1, spec);
    for (std::size_t i = 0; i < spots.size(); ++i) out[i] = backward_value(prev, spots[i], kern);
    return out;
}

}  // namespace dhedge
