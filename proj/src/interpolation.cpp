#include "dhedge/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "dhedge/common.hpp"

namespace dhedge {

UniformCubic::UniformCubic(double y0, double h, std::vector<double> values, Slopes rule)
    : y0_(y0), h_(h), values_(std::move(values)) {
    const std::size_t n = values_.size();
    if (n < 2 || !(h > 0.0)) fail(ErrorKind::kValidation, "interpolant needs >= 2 nodes and h > 0");
    slopes_.assign(n, 0.0);

    // Fourth-order differences where two neighbours exist on each side.
    auto central_slope = [&](std::size_t i) {
        const auto& v = values_;
        if (i >= 2 && i + 2 < n) return (v[i - 2] - 8 * v[i - 1] + 8 * v[i + 1] - v[i + 2]) / (12 * h);
        if (i == 1 && n >= 4) return (-2 * v[0] - 3 * v[1] + 6 * v[2] - v[3]) / (6 * h);
        if (i == n - 2 && n >= 4) return (2 * v[n - 1] + 3 * v[n - 2] - 6 * v[n - 3] + v[n - 4]) / (6 * h);
        return (v[i + 1] - v[i - 1]) / (2 * h);
    };
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (values_[i + 1] - values_[i]) / h;

    if (rule == Slopes::kCentered || n == 2) {
        slopes_[0] = secant[0];
        slopes_[n - 1] = secant[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) slopes_[i] = central_slope(i);
        if (n > 2) {
            // One-sided second-order ends.
            slopes_[0] = (-3 * values_[0] + 4 * values_[1] - values_[2]) / (2 * h);
            slopes_[n - 1] = (3 * values_[n - 1] - 4 * values_[n - 2] + values_[n - 3]) / (2 * h);
        }
        if (rule == Slopes::kCentered) return;
    }

    // Fritsch-Carlson.
    slopes_[0] = secant[0];
    slopes_[n - 1] = secant[n - 2];
    if (n >= 4) {
        // Third-order one-sided ends; the limiter below still applies.
        const auto& v = values_;
        slopes_[0] = (-11 * v[0] + 18 * v[1] - 9 * v[2] + 2 * v[3]) / (6 * h);
        slopes_[n - 1] = (11 * v[n - 1] - 18 * v[n - 2] + 9 * v[n - 3] - 2 * v[n - 4]) / (6 * h);
        if (secant[0] * slopes_[0] <= 0.0) slopes_[0] = 0.0;
        if (secant[n - 2] * slopes_[n - 1] <= 0.0) slopes_[n - 1] = 0.0;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (secant[i - 1] * secant[i] <= 0.0) {
            slopes_[i] = 0.0;
        } else {
            slopes_[i] = central_slope(i);
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (secant[i] == 0.0) {
            slopes_[i] = 0.0;
            slopes_[i + 1] = 0.0;
            continue;
        }
        const double alpha = slopes_[i] / secant[i];
        const double beta = slopes_[i + 1] / secant[i];
        const double norm = alpha * alpha + beta * beta;
        if (norm > 9.0) {
            const double scale = 3.0 / std::sqrt(norm);
            slopes_[i] = scale * alpha * secant[i];
            slopes_[i + 1] = scale * beta * secant[i];
        }
    }
}

double UniformCubic::operator()(double y) const {
    const double pos = std::clamp((y - y0_) / h_, 0.0, static_cast<double>(values_.size() - 1));
    std::size_t c = static_cast<std::size_t>(pos);
    if (c >= values_.size() - 1) c = values_.size() - 2;
    return in_cell(c, pos - static_cast<double>(c));
}

}  // namespace dhedge
