#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "dhedge/common.hpp"

namespace dhedge {

enum class DistributionKind { kLognormal, kCustom };

/// One-period law of the log return xi = ln(S_k / S_{k+1}).
///
/// Carries the density u(x) and the exponential-moment function
/// M(p) = E[exp(p xi)], which is finite for Re p in (-a, a) with a > 2.
/// Immutable and cheap to copy.
class ReturnDistribution {
public:
    /// Gaussian log return with the given per-step mean and variance
    /// (the lognormal price model). Variance 0 is accepted as a point mass.
    static ReturnDistribution lognormal(double mean, double variance, double moment_bound = 4.0);

    /// A user-supplied density. `support_lo/hi` must bracket essentially all
    /// of its mass; they seed the numeric mean and standard deviation. When
    /// `mgf` is empty the exponential moments are computed by quadrature over
    /// [mean - 12 sd, mean + 12 sd].
    static ReturnDistribution custom(std::function<double(double)> density, double moment_bound,
                                     double support_lo, double support_hi,
                                     std::function<Complex(Complex)> mgf = {});

    DistributionKind kind() const { return impl_->kind; }
    double moment_bound() const { return impl_->a; }
    double mean() const { return impl_->mean; }
    double stddev() const { return impl_->sd; }
    double variance() const { return impl_->sd * impl_->sd; }

    double density(double x) const;

    /// M(p) without domain checks. Exact for the lognormal kind.
    Complex mgf(Complex p) const;
    /// ln M(p) for real p. Exact (no exp/log round trip) for the lognormal kind.
    double log_mgf(double p) const;

private:
    struct Impl {
        DistributionKind kind = DistributionKind::kCustom;
        double a = 4.0;
        double mean = 0.0;
        double sd = 0.0;
        std::function<double(double)> density;
        std::function<Complex(Complex)> mgf;
    };
    explicit ReturnDistribution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// M(p) = E[exp(p xi)]; kDomain error unless p is in (-a, a).
double exp_moment(const ReturnDistribution& dist, double p);
/// Complex-argument variant; requires Re p in (-a, a).
Complex exp_moment(const ReturnDistribution& dist, Complex p);

struct StepMoments {
    double m = 0.0;  // E[e^xi]
    double d = 0.0;  // Var[e^xi]
};

/// m = M(1), d = M(2) - M(1)^2. kDomain error if a <= 2 or d <= 0.
StepMoments step_moments(const ReturnDistribution& dist);

struct MarketStep {
    double r = 0.0;    // risk-free rate per unit time
    double tau = 0.0;  // hedging period
    ReturnDistribution dist;

    double discount() const;
};

/// Validates tau > 0, finite r and a > 2; throws kValidation otherwise.
void validate(const MarketStep& step);

struct FeasibilityInterval {
    double r_lo = 0.0;
    double r_hi = 0.0;
    bool contains(double r) const { return r >= r_lo && r <= r_hi; }
};

/// Range of rates for which discrete hedging stays realizable:
/// ln M(1)/tau <= r <= ln(M(2)/M(1))/tau.
FeasibilityInterval feasibility_interval(const MarketStep& step);

/// Hedging steps ordered from maturity outward: steps[k] carries the market
/// between t_{k+1} and t_k = T - sum of the first k periods.
class MarketPath {
public:
    MarketPath(std::vector<MarketStep> steps, double strike);

    static MarketPath uniform(const MarketStep& step, int n, double strike);

    int size() const { return static_cast<int>(steps_.size()); }
    const MarketStep& step(int k) const { return steps_.at(static_cast<std::size_t>(k)); }
    const std::vector<MarketStep>& steps() const { return steps_; }
    double strike() const { return strike_; }
    /// T = sum of all step periods (t_0 = 0).
    double maturity() const;
    /// Product of e^{-r_m tau_m} over the first k steps.
    double discount(int k) const;
    /// Sum of log-return variances over the first k steps.
    double log_variance(int k) const;
    /// Smallest moment bound across steps.
    double moment_bound() const;

private:
    std::vector<MarketStep> steps_;
    double strike_;
};

}  // namespace dhedge
