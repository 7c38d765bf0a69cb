#include <cmath>

#include <gtest/gtest.h>

#include "dhedge/asymptotics.hpp"
#include "dhedge/lognormal.hpp"
#include "oracles.hpp"

using namespace dhedge;

namespace {

const lognormal::Params kBase{0.05, 0.2, 0.01, 0.09, 100.0, 100};

}  // namespace

TEST(EstimateExpansion, BondIsTauIndependent) {
    const double t = 1.0;
    const auto est = estimate_expansion([&](double) { return std::exp(-0.09 * t); }, t, 100.0, 2, default_tau_grid(t));
    ASSERT_EQ(est.coefficients.size(), 3u);
    EXPECT_NEAR(est.coefficients[0], std::exp(-0.09), 1e-8);
    EXPECT_NEAR(est.coefficients[1], 0.0, 1e-8);
    EXPECT_NEAR(est.coefficients[2], 0.0, 1e-8);
}

TEST(EstimateExpansion, LinearClaim) {
    const auto est = estimate_expansion([](double) { return 120.0; }, 1.0, 120.0, 1, default_tau_grid(1.0));
    EXPECT_NEAR(est.coefficients[0], 120.0, 1e-8);
    EXPECT_NEAR(est.coefficients[1], 0.0, 1e-6);
}

TEST(EstimateExpansion, RecoversPolynomial) {
    const auto est = estimate_expansion([](double tau) { return 3.0 - 2.0 * tau + 5.0 * tau * tau; }, 1.0, 1.0, 2,
                                        default_tau_grid(1.0));
    EXPECT_NEAR(est.coefficients[0], 3.0, 1e-10);
    EXPECT_NEAR(est.coefficients[1], -2.0, 1e-7);
    EXPECT_NEAR(est.coefficients[2], 5.0, 1e-4);
    for (double r : est.residuals) EXPECT_NEAR(r, 0.0, 1e-12);
}

TEST(EstimateExpansion, CallLeadingTermIsBlackScholes) {
    auto price = [](double tau) {
        lognormal::Params p = kBase;
        p.tau = tau;
        p.n = static_cast<int>(std::lround(1.0 / tau));
        return lognormal::price_closed(p, 100.0);
    };
    const auto est = estimate_expansion(price, 1.0, 100.0, 2, default_tau_grid(1.0));
    const double bs = oracle::black_scholes(100.0, 1.0, 100.0, 0.09, 0.2);
    EXPECT_NEAR(est.coefficients[0] / bs, 1.0, 5e-3);
}

TEST(EstimateExpansion, InputErrors) {
    auto f = [](double) { return 1.0; };
    EXPECT_THROW(estimate_expansion(f, 1.0, 1.0, 3, {0.5, 0.25, 0.125, 0.0625}), Error);
    EXPECT_THROW(estimate_expansion(f, 1.0, 1.0, 1, {0.3, 0.25, 0.125}), Error);
    EXPECT_THROW(estimate_expansion(f, 1.0, 1.0, 1, {0.25, 0.25, 0.125}), Error);
}

TEST(EstimateExpansion, IllConditionedFitIsReported) {
    std::vector<double> taus;
    for (int n = 1000; n <= 1006; ++n) taus.push_back(1.0 / n);
    try {
        estimate_expansion([](double) { return 1.0; }, 1.0, 1.0, 5, taus);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kFit);
    }
}

TEST(BsLimit, FirstOrderConvergence) {
    const auto rep = bs_limit_check(kBase, 1.0, 100.0, {8, 16, 32, 64, 128, 256});
    EXPECT_TRUE(rep.monotone);
    EXPECT_GE(rep.order, 0.8);
    EXPECT_LE(rep.order, 1.2);
    EXPECT_LT(rep.final_relative_error, 0.01);
    EXPECT_NEAR(rep.reference, oracle::black_scholes(100.0, 1.0, 100.0, 0.09, 0.2), 1e-12);
}

TEST(BsLimit, DeterministicAssetHasNoError) {
    lognormal::Params p = kBase;
    p.sigma = 1e-3;
    p.r = p.mu + p.sigma * p.sigma;
    const auto rep = bs_limit_check(p, 1.0, 100.0, {8, 16, 32, 64});
    for (const auto& row : rep.rows) EXPECT_LT(row.error, 1e-9);
}
