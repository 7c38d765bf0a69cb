#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace dhedge {

using Complex = std::complex<double>;

/// Classes of failure. The CLI maps the first group to exit code 1 and the
/// numeric group to exit code 2.
enum class ErrorKind {
    kValidation,        // malformed input or configuration
    kDomain,            // argument outside a function's domain
    kStrip,             // Mellin argument outside the strip of convergence
    kUnsupportedPayoff,
    kNumeric,           // quadrature failed to converge
    kContour,           // contour truncation too coarse
    kFit,               // ill-conditioned regression
    kBracketing,        // Monte Carlo vertex outside the candidate grid
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// True for convergence-style failures (exit code 2).
    bool is_numeric() const noexcept {
        return kind_ == ErrorKind::kNumeric || kind_ == ErrorKind::kContour ||
               kind_ == ErrorKind::kFit || kind_ == ErrorKind::kBracketing;
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

/// Negative-value threshold as a fraction of the strike.
inline constexpr double kNegativeTolerance = 1e-9;

/// Worker thread count used by the data-parallel loops. 0 means hardware
/// concurrency. Results never depend on this value.
void set_worker_threads(unsigned threads);
unsigned worker_threads();

/// Runs body(i) for i in [0, count) across worker threads. Each index is
/// visited exactly once; body must only write to index-owned state.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace dhedge
