#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "dhedge/market_model.hpp"

namespace dhedge::mc {

/// Philox4x32-10 counter-based generator (Random123 family).
/// Stateless: the output depends only on (key, counter).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Uniform in (0, 1) for path `index` under `seed`; identical on every
/// thread and platform.
double keyed_uniform(std::uint64_t seed, std::uint64_t index);

struct SimConfig {
    std::uint64_t n_paths = 1'000'000;
    std::uint64_t seed = 20240101;
    std::vector<double> delta_grid;  // candidates for fit_optimal_delta
};

/// Statistics of the one-step hedged portfolio Pi = V(s e^xi) - delta s e^xi.
struct HedgeReport {
    double delta = 0.0;
    double mean_pi = 0.0;
    double var_pi = 0.0;
    double stderr_mean = 0.0;   // sqrt(var_pi / n)
    double stderr_var = 0.0;    // sqrt((m4 - var^2) / n)
    double fitted_delta = 0.0;  // variance-minimizing delta estimated from the sample
    double fitted_delta_stderr = 0.0;
    std::uint64_t n_paths = 0;
};

/// Samples xi ~ step.dist with keyed streams (inverse-CDF normals for the
/// lognormal kind, tabulated inverse CDF otherwise). Bit-identical output for
/// any worker thread count.
HedgeReport simulate_hedged_step(const std::function<double(double)>& v_k, double delta, double s,
                                 const MarketStep& step, const SimConfig& cfg);

struct DeltaFit {
    std::vector<HedgeReport> rows;  // one per delta_grid entry, common random numbers
    double fitted_delta = 0.0;      // vertex of the quadratic var(delta)
    double fitted_delta_stderr = 0.0;
};

/// Quadratic fit of var(delta) over cfg.delta_grid. Throws kBracketing if
/// the vertex falls outside the grid hull and kValidation for fewer than 5
/// candidates.
DeltaFit fit_optimal_delta(const std::function<double(double)>& v_k, double s,
                           const MarketStep& step, const SimConfig& cfg);

/// n_points candidates spanning center * (1 +- spread).
std::vector<double> delta_grid_around(double center, double spread = 0.2, int n_points = 5);

}  // namespace dhedge::mc
