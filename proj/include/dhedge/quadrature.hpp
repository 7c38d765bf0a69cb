#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dhedge/common.hpp"

namespace dhedge::quad {

/// Adaptive Gauss-Kronrod on [lo, hi] to the given absolute tolerance.
double adaptive(const std::function<double(double)>& f, double lo, double hi,
                double abs_tol = 1e-12);

/// Composite Simpson on [lo, hi] with an even number of panels.
double simpson(const std::function<double(double)>& f, double lo, double hi, int panels);

/// A pair of nested composite Simpson rules sharing nodes. The fine rule has
/// twice the panels of the coarse rule; the coarse weights are zero on the
/// nodes only the fine rule uses.
struct NestedRule {
    std::vector<double> nodes;
    std::vector<double> fine;
    std::vector<double> coarse;
};

/// Builds a nested rule on [breaks.front(), breaks.back()] that never
/// straddles an interior breakpoint. Panels are distributed in proportion to
/// sub-interval length; `coarse_panels` is the coarse total.
NestedRule nested_simpson(std::span<const double> breaks, int coarse_panels);

/// Sorted, de-duplicated breakpoints: lo, hi, and every interior point of
/// `candidates` that lies strictly inside (lo, hi).
std::vector<double> breakpoints(double lo, double hi, std::span<const double> candidates);

struct Estimate {
    double value = 0.0;
    double change = 0.0;   // |fine - coarse| at the accepted level
    int panels = 0;        // fine panel count at the accepted level
};

/// Piecewise composite Simpson with panel doubling: starts at `panels`
/// coarse panels and doubles until fine and coarse agree to
/// rel_tol*|fine| + abs_tol. Throws kNumeric after `max_doublings`.
Estimate simpson_doubling(const std::function<double(double)>& f,
                          std::span<const double> breaks, int panels, double rel_tol,
                          double abs_tol, int max_doublings = 6);

}  // namespace dhedge::quad
