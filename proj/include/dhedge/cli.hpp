#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace dhedge::cli {

/// Command-line overrides; anything unset falls back to the config file.
struct Options {
    std::string command;
    std::string config_path;
    std::string out_path;
    std::optional<std::string> method;
    std::optional<double> tolerance;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumeric = 2;

/// Commands: price, delta, feasibility, crosscheck, xi-scan, bs-converge,
/// simulate, asymptote. CSV goes to `out` (or the configured file),
/// diagnostics to `err`. Returns the process exit code.
int run(const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace dhedge::cli
