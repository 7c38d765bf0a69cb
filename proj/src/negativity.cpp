#include "dhedge/negativity.hpp"

#include <algorithm>
#include <cmath>

namespace dhedge {

double NegativityReport::log_measure() const {
    double total = 0.0;
    for (const auto& iv : intervals) total += std::log(iv.s_hi / iv.s_lo);
    return total;
}

namespace {

// Crossing of V = -eps between log-moneyness a (V >= -eps) and b (V < -eps).
double bisect_crossing(const PriceGrid& v, double eps, double a, double b) {
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (a + b);
        if (v.at_log(mid) < -eps) {
            b = mid;
        } else {
            a = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

NegativityReport scan_negative_set(const PriceGrid& v, double eps) {
    NegativityReport report;
    report.k = v.step_index();
    const std::size_t n = v.size();
    const double h = v.log_spacing();
    report.min_value = v.value(0);
    report.min_location = v.s(0);
    for (std::size_t i = 0; i < n; ++i) {
        if (v.value(i) < report.min_value) {
            report.min_value = v.value(i);
            report.min_location = v.s(i);
        }
    }

    std::size_t i = 0;
    while (i < n) {
        if (!(v.value(i) < -eps)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        double run_min = v.value(i);
        while (j + 1 < n && v.value(j + 1) < -eps) {
            ++j;
            run_min = std::min(run_min, v.value(j));
        }
        const double yi = v.log_lo() + h * static_cast<double>(i);
        const double yj = v.log_lo() + h * static_cast<double>(j);
        const double lo = i == 0 ? yi : bisect_crossing(v, eps, yi - h, yi);
        const double hi = j + 1 == n ? yj : bisect_crossing(v, eps, yj + h, yj);
        report.intervals.push_back({v.strike() * std::exp(lo), v.strike() * std::exp(hi), run_min});
        i = j + 1;
    }
    return report;
}

std::vector<ShrinkagePoint> shrinkage_profile(const std::function<MarketPath(double)>& family,
                                              double t, const std::vector<double>& taus,
                                              const GridSpec& spec) {
    std::vector<ShrinkagePoint> out;
    for (double tau : taus) {
        if (!(tau > 0.0)) fail(ErrorKind::kValidation, "shrinkage_profile needs tau > 0");
        const double steps = t / tau;
        const int k = static_cast<int>(std::lround(steps));
        if (std::abs(steps - k) > 1e-9 * std::max(1.0, steps)) {
            fail(ErrorKind::kValidation, "tau must divide t into a whole number of steps");
        }
        const MarketPath path = family(tau);
        const PriceGrid grid = price_recursive_final(path, Payoff::call(path.strike()), k, spec);
        const auto report = scan_negative_set(grid, negative_threshold(grid));
        out.push_back({tau, k, report.log_measure(), report.min_value});
    }
    return out;
}

}  // namespace dhedge
