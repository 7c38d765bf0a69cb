#include "dhedge/market_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dhedge/quadrature.hpp"

namespace dhedge {

namespace {

void check_moment_bound(double a) {
    if (!(a > 2.0) || !std::isfinite(a)) {
        std::ostringstream msg;
        msg << "moment bound a must satisfy a > 2 (got " << a << ")";
        fail(ErrorKind::kValidation, msg.str());
    }
}

}  // namespace

ReturnDistribution ReturnDistribution::lognormal(double mean, double variance, double moment_bound) {
    check_moment_bound(moment_bound);
    if (!(variance >= 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
        fail(ErrorKind::kValidation, "lognormal log-return variance must be finite and >= 0");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = DistributionKind::kLognormal;
    impl->a = moment_bound;
    impl->mean = mean;
    impl->sd = std::sqrt(variance);
    const double sd = impl->sd;
    impl->density = [mean, sd](double x) {
        if (sd == 0.0) return 0.0;
        const double z = (x - mean) / sd;
        return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
    };
    impl->mgf = [mean, variance](Complex p) { return std::exp(mean * p + 0.5 * variance * p * p); };
    return ReturnDistribution(std::move(impl));
}

ReturnDistribution ReturnDistribution::custom(std::function<double(double)> density,
                                              double moment_bound, double support_lo,
                                              double support_hi,
                                              std::function<Complex(Complex)> mgf) {
    check_moment_bound(moment_bound);
    if (!density) fail(ErrorKind::kValidation, "custom distribution needs a density");
    if (!(support_hi > support_lo)) fail(ErrorKind::kValidation, "empty density support bracket");

    const double mass = quad::adaptive(density, support_lo, support_hi, 1e-10);
    if (std::abs(mass - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "density integrates to " << mass << " over its support, expected 1";
        fail(ErrorKind::kValidation, msg.str());
    }
    const double mean =
        quad::adaptive([&](double x) { return x * density(x); }, support_lo, support_hi, 1e-12);
    const double var = quad::adaptive(
        [&](double x) { return (x - mean) * (x - mean) * density(x); }, support_lo, support_hi,
        1e-12);
    if (!(var > 0.0)) fail(ErrorKind::kValidation, "density has zero variance");

    auto impl = std::make_shared<Impl>();
    impl->kind = DistributionKind::kCustom;
    impl->a = moment_bound;
    impl->mean = mean;
    impl->sd = std::sqrt(var);
    impl->density = density;
    if (mgf) {
        impl->mgf = std::move(mgf);
    } else {
        const double lo = mean - 12.0 * impl->sd;
        const double hi = mean + 12.0 * impl->sd;
        impl->mgf = [density, lo, hi](Complex p) {
            const double re = quad::adaptive(
                [&](double x) { return (std::exp(p * x)).real() * density(x); }, lo, hi, 1e-10);
            if (p.imag() == 0.0) return Complex(re, 0.0);
            const double im = quad::adaptive(
                [&](double x) { return (std::exp(p * x)).imag() * density(x); }, lo, hi, 1e-10);
            return Complex(re, im);
        };
    }
    return ReturnDistribution(std::move(impl));
}

double ReturnDistribution::density(double x) const { return impl_->density(x); }

Complex ReturnDistribution::mgf(Complex p) const { return impl_->mgf(p); }

double ReturnDistribution::log_mgf(double p) const {
    if (impl_->kind == DistributionKind::kLognormal) {
        return impl_->mean * p + 0.5 * impl_->sd * impl_->sd * p * p;
    }
    return std::log(impl_->mgf(Complex(p, 0.0)).real());
}

double exp_moment(const ReturnDistribution& dist, double p) {
    return exp_moment(dist, Complex(p, 0.0)).real();
}

Complex exp_moment(const ReturnDistribution& dist, Complex p) {
    const double a = dist.moment_bound();
    if (!(p.real() > -a && p.real() < a)) {
        std::ostringstream msg;
        msg << "exp_moment: Re p = " << p.real() << " outside (-" << a << ", " << a
            << "); moment not guaranteed finite";
        fail(ErrorKind::kDomain, msg.str());
    }
    return dist.mgf(p);
}

StepMoments step_moments(const ReturnDistribution& dist) {
    StepMoments out;
    if (dist.kind() == DistributionKind::kLognormal) {
        // m = e^{mean + var/2}, d = m^2 (e^{var} - 1); expm1 keeps d accurate for small var.
        const double var = dist.variance();
        out.m = std::exp(dist.mean() + 0.5 * var);
        out.d = out.m * out.m * std::expm1(var);
    } else {
        out.m = exp_moment(dist, 1.0);
        out.d = exp_moment(dist, 2.0) - out.m * out.m;
    }
    if (!(out.d > 0.0)) {
        std::ostringstream msg;
        msg << "variance of e^xi must be positive (got d = " << out.d << ")";
        fail(ErrorKind::kDomain, msg.str());
    }
    return out;
}

double MarketStep::discount() const { return std::exp(-r * tau); }

void validate(const MarketStep& step) {
    if (!(step.tau > 0.0) || !std::isfinite(step.tau)) {
        fail(ErrorKind::kValidation, "hedging period tau must be positive");
    }
    if (!std::isfinite(step.r)) fail(ErrorKind::kValidation, "risk-free rate must be finite");
    check_moment_bound(step.dist.moment_bound());
}

FeasibilityInterval feasibility_interval(const MarketStep& step) {
    validate(step);
    // Confirms d > 0 so the interval is non-empty.
    step_moments(step.dist);
    const double l1 = step.dist.log_mgf(1.0);
    const double l2 = step.dist.log_mgf(2.0);
    return {l1 / step.tau, (l2 - l1) / step.tau};
}

MarketPath::MarketPath(std::vector<MarketStep> steps, double strike)
    : steps_(std::move(steps)), strike_(strike) {
    if (!(strike > 0.0) || !std::isfinite(strike)) {
        fail(ErrorKind::kValidation, "strike must be positive");
    }
    for (const auto& s : steps_) validate(s);
}

MarketPath MarketPath::uniform(const MarketStep& step, int n, double strike) {
    if (n < 0) fail(ErrorKind::kValidation, "step count must be >= 0");
    return MarketPath(std::vector<MarketStep>(static_cast<std::size_t>(n), step), strike);
}

double MarketPath::maturity() const {
    double t = 0.0;
    for (const auto& s : steps_) t += s.tau;
    return t;
}

double MarketPath::discount(int k) const {
    double rt = 0.0;
    for (int m = 0; m < k; ++m) rt += steps_[static_cast<std::size_t>(m)].r * steps_[static_cast<std::size_t>(m)].tau;
    return std::exp(-rt);
}

double MarketPath::log_variance(int k) const {
    double v = 0.0;
    for (int m = 0; m < k; ++m) v += steps_[static_cast<std::size_t>(m)].dist.variance();
    return v;
}

double MarketPath::moment_bound() const {
    double a = 4.0;
    bool first = true;
    for (const auto& s : steps_) {
        a = first ? s.dist.moment_bound() : std::min(a, s.dist.moment_bound());
        first = false;
    }
    return a;
}

}  // namespace dhedge
