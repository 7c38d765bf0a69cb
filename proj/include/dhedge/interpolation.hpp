#pragma once

#include <span>
#include <vector>

namespace dhedge {

/// Cubic Hermite interpolant on a uniform abscissa y_i = y0 + i*h.
class UniformCubic {
public:
    enum class Slopes {
        kMonotone,  // Fritsch-Carlson limited; no overshoot between nodes
        kCentered,  // three-point finite differences; for smooth oscillating data
    };

    UniformCubic() = default;
    UniformCubic(double y0, double h, std::vector<double> values, Slopes rule);

    std::size_t size() const { return values_.size(); }
    double y0() const { return y0_; }
    double spacing() const { return h_; }
    double y_back() const { return y0_ + h_ * static_cast<double>(values_.size() - 1); }
    std::span<const double> values() const { return values_; }
    std::span<const double> slopes() const { return slopes_; }

    /// Interpolated value; y is clamped into [y0, y_back].
    double operator()(double y) const;

    /// Hermite evaluation inside cell `c` at fractional position t in [0, 1].
    double in_cell(std::size_t c, double t) const {
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * values_[c] + h10 * h_ * slopes_[c] + h01 * values_[c + 1] +
               h11 * h_ * slopes_[c + 1];
    }

private:
    double y0_ = 0.0;
    double h_ = 1.0;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

}  // namespace dhedge
