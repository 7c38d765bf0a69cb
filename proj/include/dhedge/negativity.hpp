#pragma once

#include <functional>
#include <vector>

#include "dhedge/kernel.hpp"
#include "dhedge/market_model.hpp"

namespace dhedge {

struct PriceInterval {
    double s_lo = 0.0;
    double s_hi = 0.0;
    double min_value = 0.0;
};

/// Where V_k drops below -eps: the asset-price states in which the hedging
/// policy cannot be carried out.
struct NegativityReport {
    int k = 0;
    std::vector<PriceInterval> intervals;  // disjoint, ascending
    double min_value = 0.0;
    double min_location = 0.0;

    bool empty() const { return intervals.empty(); }
    /// Total length of the intervals in ln s.
    double log_measure() const;
};

/// Maximal runs of grid nodes with V < -eps, endpoints refined by 40
/// bisection steps on the interpolant.
NegativityReport scan_negative_set(const PriceGrid& v, double eps);

/// Default threshold for a grid: 1e-9 * E.
inline double negative_threshold(const PriceGrid& v) { return kNegativeTolerance * v.strike(); }

struct ShrinkagePoint {
    double tau = 0.0;
    int k = 0;
    double log_measure = 0.0;
    double min_value = 0.0;
};

/// For each tau, builds the path `family(tau)`, prices the call back to time
/// t (k = t / tau steps) and measures the negative set there.
std::vector<ShrinkagePoint> shrinkage_profile(const std::function<MarketPath(double)>& family,
                                              double t, const std::vector<double>& taus,
                                              const GridSpec& spec = {});

}  // namespace dhedge
