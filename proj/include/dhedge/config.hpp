#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dhedge/kernel.hpp"
#include "dhedge/lognormal.hpp"
#include "dhedge/mellin.hpp"

namespace dhedge {

enum class Method { kRecursive, kMellin, kGreen, kClosed };

Method parse_method(const std::string& name);
std::string method_name(Method m);

/// Contents of an INI-style run configuration:
///
///   [model]     mu, sigma, r, tau, n, strike, distribution (lognormal),
///               spot | spot_lo + spot_hi + spot_count
///   [method]    name = recursive | mellin | green | closed
///   [contour]   a, a0, p_max, nodes
///   [grid]      nodes, half_width
///   [mc]        paths, seed, k, spread, points
///   [converge]  ns = 8,16,32
///   [asymptote] order, ns
///   [crosscheck] tolerance
///   [output]    path
///
/// Every section except [model] is optional.
struct RunConfig {
    lognormal::Params model;
    double moment_bound = 4.0;
    std::vector<double> spots;
    std::optional<Method> method;
    mellin::MellinLine contour;
    GridSpec grid;
    std::uint64_t mc_paths = 1'000'000;
    std::uint64_t mc_seed = 20240101;
    int mc_k = 1;
    double mc_spread = 0.2;
    int mc_points = 5;
    std::vector<int> converge_ns{8, 16, 32, 64, 128, 256};
    int asymptote_order = 2;
    std::vector<int> asymptote_ns{16, 32, 64, 128, 256};
    double crosscheck_tolerance = 1e-3;
    std::string output_path;

    MarketPath path() const { return model.path(moment_bound); }
};

/// Parses and validates; throws Error(kValidation) naming the offending key.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

}  // namespace dhedge
