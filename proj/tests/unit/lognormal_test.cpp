#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dhedge/kernel.hpp"
#include "dhedge/lognormal.hpp"
#include "dhedge/mellin.hpp"
#include "oracles.hpp"

using namespace dhedge;
using lognormal::Params;

namespace {

const Params kBase{0.05, 0.2, 0.01, 0.09, 100.0, 1};

// M2 = m (1 - e^{-r tau} m) / d, read off the kernel transform.
double m2_from_kernel(const Params& p) {
    const oracle::Kernel k{p.mu * p.tau, p.sigma * p.sigma * p.tau, p.r * p.tau};
    return k.m() * (1.0 - std::exp(-p.r * p.tau) * k.m()) / k.d();
}

}  // namespace

TEST(ClosedMoments, Example) {
    const auto mo = lognormal::closed_moments(kBase);
    EXPECT_NEAR(mo.m, 1.000700, 5e-7);
    EXPECT_NEAR(mo.d, 4.0064e-4, 5e-8);
    const auto q = step_moments(kBase.step().dist);
    EXPECT_NEAR(mo.m, q.m, 1e-15);
    EXPECT_NEAR(mo.d / q.d, 1.0, 1e-12);
    EXPECT_NEAR(mo.d, mo.m * mo.m * std::expm1(0.0004), 1e-18);
}

TEST(ClosedMoments, DegenerateLimit) {
    const auto mo = lognormal::closed_moments(Params{0.0, 1e-8, 0.01, 0.0, 100.0, 1});
    EXPECT_NEAR(mo.m, 1.0, 1e-15);
    EXPECT_LT(mo.d, 1e-17);
}

TEST(Coefficients, Example) {
    const auto c = lognormal::coefficients(kBase);
    EXPECT_NEAR(c.m1, 0.49960, 5e-6);
    EXPECT_NEAR(c.m2, 0.49950, 5e-6);
    EXPECT_NEAR(c.m2, m2_from_kernel(kBase), 1e-10);
    EXPECT_NEAR(c.m1 + c.m2, std::exp(-0.0009), 1e-15);
}

TEST(Coefficients, SumIsDiscountAcrossSweep) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<> mu(-0.2, 0.3), sigma(0.02, 0.8), tau(0.001, 0.5), r(-0.1, 0.4);
    for (int i = 0; i < 200; ++i) {
        const Params p{mu(rng), sigma(rng), tau(rng), r(rng), 100.0, 1};
        const auto c = lognormal::coefficients(p);
        // M1 is formed as e^{-r tau} - M2, so round-off scales with |M2|.
        ASSERT_NEAR(c.m1 + c.m2, std::exp(-p.r * p.tau), 1e-14 * std::max(1.0, std::abs(c.m2)));
        ASSERT_NEAR(c.m2, m2_from_kernel(p), 1e-9 * std::max(1.0, std::abs(c.m2)));
    }
}

TEST(Coefficients, SecondVanishesAtLowerFeasibleRate) {
    Params p = kBase;
    p.r = p.mu + 0.5 * p.sigma * p.sigma;
    EXPECT_NEAR(lognormal::coefficients(p).m2, 0.0, 1e-13);
}

TEST(Coefficients, SignsTrackFeasibility) {
    for (double r : {0.05, 0.069, 0.071, 0.09, 0.109, 0.111, 0.2}) {
        Params p = kBase;
        p.r = r;
        const auto c = lognormal::coefficients(p);
        const bool nonneg = c.m1 >= 0.0 && c.m2 >= 0.0;
        EXPECT_EQ(nonneg, feasibility_interval(p.step()).contains(r)) << r;
    }
}

TEST(Coefficients, ZeroSigmaIsDomainError) {
    Params p = kBase;
    p.sigma = 0.0;
    EXPECT_THROW(lognormal::coefficients(p), Error);
}

TEST(UClosed, FixedPoints) {
    EXPECT_NEAR(std::abs(lognormal::u_closed(kBase, 0.0) - std::exp(-0.0009)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(lognormal::u_closed(kBase, 1.0) - 1.0), 0.0, 1e-12);
}

TEST(UClosed, MatchesGenericKernelTransform) {
    const PricingKernel k(kBase.step());
    for (Complex p : {Complex(-2.0, 0.0), Complex(-2.0, 9.0), Complex(1.5, -3.0)}) {
        EXPECT_NEAR(std::abs(lognormal::u_closed(kBase, p) - mellin::kernel_transform(k, p)), 0.0, 1e-10) << p;
    }
}

TEST(GreenClosed, SingleBumpWhenSecondWeightVanishes) {
    Params p = kBase;
    p.r = p.mu + 0.5 * p.sigma * p.sigma;
    const double m1 = lognormal::coefficients(p).m1;
    for (double x : {0.95, 1.0, 1.02}) {
        EXPECT_NEAR(lognormal::green_closed(p, x), m1 * oracle::normal_pdf(-std::log(x), 0.0005, 0.02), 1e-10);
    }
}

TEST(GreenClosed, MassIsCompoundDiscount) {
    Params p = kBase;
    p.n = 7;
    const double mass = oracle::gauss([&](double w) { return lognormal::green_closed(p, std::exp(w)); }, -1.0, 1.0, 80);
    EXPECT_NEAR(mass, std::exp(-7 * 0.0009), 1e-12);
}

TEST(GreenClosed, LargeStepCountStaysFinite) {
    Params p = kBase;
    p.n = 2000;
    p.tau = 0.0005;
    const double g = lognormal::green_closed(p, std::exp(-0.05));
    EXPECT_TRUE(std::isfinite(g));
    EXPECT_GT(g, 0.0);
}

TEST(PriceClosed, OneStepMatchesBackwardStep) {
    const auto path = kBase.path();
    const std::vector<double> spots{90.0, 100.0, 104.0};
    const auto at = price_recursive_at(path, Payoff::call(100.0), 1, spots);
    for (std::size_t i = 0; i < spots.size(); ++i) {
        EXPECT_NEAR(lognormal::price_closed(kBase, spots[i]), at[i], 1e-6) << spots[i];
    }
    const auto v1 = price_recursive_final(path, Payoff::call(100.0), 1);
    for (std::size_t i = 0; i < v1.size(); i += 97) {
        ASSERT_NEAR(lognormal::price_closed(kBase, v1.s(i)), v1.value(i), 1e-6) << v1.s(i);
    }
}

TEST(PriceClosed, ZeroStepsIsPayoff) {
    Params p = kBase;
    p.n = 0;
    EXPECT_DOUBLE_EQ(lognormal::price_closed(p, 150.0), 50.0);
    EXPECT_DOUBLE_EQ(lognormal::price_closed(p, 50.0), 0.0);
    EXPECT_THROW(lognormal::price_closed(p, 0.0), Error);
}

TEST(PriceClosed, ApproachesBlackScholes) {
    Params p = kBase;
    p.n = 1000;
    p.tau = 0.001;
    EXPECT_NEAR(lognormal::price_closed(p, 100.0), 12.68, 5e-3);
}

TEST(PriceNoJacobian, DiffersFromPrice) {
    Params p = kBase;
    p.n = 100;
    const double v = lognormal::price_closed(p, 100.0);
    const double w = lognormal::price_no_jacobian(p, 100.0);
    EXPECT_GT(std::abs(v - w), 1e-3 * v);
}

TEST(BlackScholes, Examples) {
    EXPECT_DOUBLE_EQ(lognormal::black_scholes(150.0, 0.0, 100.0, 0.09, 0.2), 50.0);
    EXPECT_NEAR(lognormal::black_scholes(200.0, 1.0, 100.0, 0.09, 0.0), 200.0 - 100.0 * std::exp(-0.09), 1e-12);
    EXPECT_NEAR(lognormal::black_scholes(200.0, 1.0, 100.0, 0.09, 0.0), 108.61, 5e-3);
    EXPECT_NEAR(lognormal::normal_cdf(0.55), 0.70884, 5e-6);
    EXPECT_NEAR(lognormal::normal_cdf(0.35), 0.63683, 5e-6);
    EXPECT_NEAR(lognormal::black_scholes(100.0, 1.0, 100.0, 0.09, 0.2), 12.68, 5e-3);
    EXPECT_NEAR(lognormal::black_scholes(100.0, 1.0, 100.0, 0.09, 0.2), oracle::black_scholes(100.0, 1.0, 100.0, 0.09, 0.2),
                1e-12);
}

TEST(ParamsValidation, RejectsBadInput) {
    EXPECT_THROW(lognormal::validate(Params{0.05, -0.1, 0.01, 0.09, 100.0, 1}), Error);
    EXPECT_THROW(lognormal::validate(Params{0.05, 0.2, 0.0, 0.09, 100.0, 1}), Error);
    EXPECT_THROW(lognormal::validate(Params{0.05, 0.2, 0.01, 0.09, -1.0, 1}), Error);
    EXPECT_THROW(lognormal::validate(Params{0.05, 0.2, 0.01, 0.09, 100.0, -1}), Error);
    EXPECT_NO_THROW(lognormal::validate(kBase));
}
