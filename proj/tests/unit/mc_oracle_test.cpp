#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

#include "dhedge/kernel.hpp"
#include "dhedge/lognormal.hpp"
#include "dhedge/mc_oracle.hpp"
#include "oracles.hpp"

using namespace dhedge;
using namespace dhedge::mc;

namespace {

const lognormal::Params kBase{0.05, 0.2, 0.01, 0.09, 100.0, 3};

SimConfig paths(std::uint64_t n) {
    SimConfig c;
    c.n_paths = n;
    return c;
}

bool same_bits(const HedgeReport& a, const HedgeReport& b) {
    return std::memcmp(&a.mean_pi, &b.mean_pi, sizeof(double)) == 0 &&
           std::memcmp(&a.var_pi, &b.var_pi, sizeof(double)) == 0 &&
           std::memcmp(&a.stderr_mean, &b.stderr_mean, sizeof(double)) == 0 &&
           std::memcmp(&a.fitted_delta, &b.fitted_delta, sizeof(double)) == 0;
}

}  // namespace

TEST(Philox, KnownAnswers) {
    using W = std::array<std::uint32_t, 4>;
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}), (W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(KeyedUniform, OpenUnitIntervalAndUniformMoments) {
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = keyed_uniform(42, static_cast<std::uint64_t>(i));
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sq += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 3e-3);
    EXPECT_NEAR(sq / n, 1.0 / 3.0, 3e-3);
    EXPECT_NE(keyed_uniform(1, 5), keyed_uniform(2, 5));
    EXPECT_EQ(keyed_uniform(1, 5), keyed_uniform(1, 5));
}

TEST(Simulate, ConstantPortfolio) {
    const auto r = simulate_hedged_step([](double) { return 7.0; }, 0.0, 100.0, kBase.step(), paths(20000));
    EXPECT_DOUBLE_EQ(r.mean_pi, 7.0);
    EXPECT_DOUBLE_EQ(r.var_pi, 0.0);
    EXPECT_DOUBLE_EQ(r.stderr_mean, 0.0);
}

TEST(Simulate, PerfectHedgeOfLinearClaim) {
    const auto r = simulate_hedged_step([](double x) { return x; }, 1.0, 100.0, kBase.step(), paths(20000));
    EXPECT_NEAR(r.mean_pi, 0.0, 1e-12);
    EXPECT_NEAR(r.var_pi, 0.0, 1e-20);
}

TEST(Simulate, SampleMomentsOfGrowth) {
    // Pi = -s e^xi: mean -s m, variance s^2 d.
    const auto r = simulate_hedged_step([](double) { return 0.0; }, 1.0, 100.0, kBase.step(), paths(1'000'000));
    const oracle::Kernel k{0.0005, 0.0004, 0.0009};
    EXPECT_NEAR(r.mean_pi, -100.0 * k.m(), 3.0 * r.stderr_mean);
    EXPECT_NEAR(r.var_pi, 1e4 * k.d(), 3.0 * r.stderr_var);
    EXPECT_NEAR(r.stderr_mean, std::sqrt(r.var_pi / 1e6), 1e-15);
}

TEST(Simulate, IndependentOfThreadCount) {
    const auto v = [](double x) { return std::max(x - 100.0, 0.0); };
    set_worker_threads(1);
    const auto a = simulate_hedged_step(v, 0.5, 100.0, kBase.step(), paths(300000));
    set_worker_threads(4);
    const auto b = simulate_hedged_step(v, 0.5, 100.0, kBase.step(), paths(300000));
    set_worker_threads(7);
    const auto c = simulate_hedged_step(v, 0.5, 100.0, kBase.step(), paths(300000));
    set_worker_threads(0);
    EXPECT_TRUE(same_bits(a, b));
    EXPECT_TRUE(same_bits(a, c));
}

TEST(Simulate, PricingIdentityOneStepBack) {
    const auto path = kBase.path();
    const auto grids = price_recursive(path, Payoff::call(100.0));
    const PricingKernel kern(path.step(1));
    const double s = 100.0;
    const double delta = min_variance_delta(grids[1], s, kern);
    const auto r = simulate_hedged_step([&](double x) { return grids[1](x); }, delta, s, kern.step(), paths(1'000'000));
    const double expected = std::exp(0.0009) * portfolio_value(grids[2](s), delta, s);
    EXPECT_NEAR(r.mean_pi, expected, 3.0 * r.stderr_mean);
}

TEST(Simulate, CustomDistributionSampler) {
    const auto dist = ReturnDistribution::custom(
        [](double x) { return 0.5 * oracle::normal_pdf(x, -0.01, 0.01) + 0.5 * oracle::normal_pdf(x, 0.012, 0.02); }, 4.0,
        -0.3, 0.3);
    const MarketStep step{0.0, 0.01, dist};
    const auto r = simulate_hedged_step([](double) { return 0.0; }, -1.0, 1.0, step, paths(400000));
    EXPECT_NEAR(r.mean_pi, exp_moment(dist, 1.0), 4.0 * r.stderr_mean);
}

TEST(FitOptimalDelta, LinearAndConstant) {
    SimConfig cfg = paths(50000);
    cfg.delta_grid = delta_grid_around(1.0);
    EXPECT_NEAR(fit_optimal_delta([](double x) { return x; }, 100.0, kBase.step(), cfg).fitted_delta, 1.0, 1e-9);
    cfg.delta_grid = {-0.2, -0.1, 0.0, 0.1, 0.2};
    EXPECT_NEAR(fit_optimal_delta([](double) { return 3.0; }, 100.0, kBase.step(), cfg).fitted_delta, 0.0, 1e-9);
}

TEST(FitOptimalDelta, CallMatchesQuadratureDelta) {
    const PricingKernel kern(kBase.step());
    const double delta = min_variance_delta(Payoff::call(100.0), 100.0, kern);
    SimConfig cfg = paths(1'000'000);
    cfg.delta_grid = delta_grid_around(delta);
    const auto fit = fit_optimal_delta([](double x) { return std::max(x - 100.0, 0.0); }, 100.0, kern.step(), cfg);
    EXPECT_EQ(fit.rows.size(), 5u);
    EXPECT_GT(fit.fitted_delta_stderr, 0.0);
    EXPECT_NEAR(fit.fitted_delta, delta, 2.0 * fit.fitted_delta_stderr);
}

TEST(FitOptimalDelta, GridErrors) {
    SimConfig cfg = paths(20000);
    auto call = [](double x) { return std::max(x - 100.0, 0.0); };
    cfg.delta_grid = {0.1, 0.2, 0.3};
    EXPECT_THROW(fit_optimal_delta(call, 100.0, kBase.step(), cfg), Error);
    cfg.delta_grid = {0.9, 0.95, 1.0, 1.05, 1.1};
    try {
        fit_optimal_delta(call, 100.0, kBase.step(), cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kBracketing);
    }
}

TEST(DeltaGridAround, SpansTwentyPercent) {
    const auto g = delta_grid_around(0.5);
    ASSERT_EQ(g.size(), 5u);
    EXPECT_DOUBLE_EQ(g.front(), 0.4);
    EXPECT_DOUBLE_EQ(g[2], 0.5);
    EXPECT_DOUBLE_EQ(g.back(), 0.6);
}
