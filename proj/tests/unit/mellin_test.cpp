#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dhedge/lognormal.hpp"
#include "dhedge/mellin.hpp"
#include "oracles.hpp"

using namespace dhedge;
using namespace dhedge::mellin;

namespace {

const lognormal::Params kBase{0.05, 0.2, 0.01, 0.09, 100.0, 4};
const oracle::Kernel kRef{0.0005, 0.0004, 0.0009};

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::kValidation;
}

TransformFn payoff_fn(double strike) {
    return {[strike](Complex p) { return payoff_transform_call(strike, p); }, -3.0, -1.0};
}

}  // namespace

TEST(MellinForward, CallPayoffAtMinusTwo) {
    const double kink[] = {1.0};
    const Complex v = mellin_forward([](double x) { return std::max(x - 1.0, 0.0); }, -2.0, std::nullopt, kink);
    EXPECT_NEAR(v.real(), 0.5, 1e-10);
    EXPECT_NEAR(v.imag(), 0.0, 1e-14);
}

TEST(MellinForward, IndicatorOfUnitToE) {
    const double kinks[] = {1.0, std::numbers::e};
    auto h = [](double x) { return x >= 1.0 && x <= std::numbers::e ? 1.0 : 0.0; };
    for (double p : {-2.0, -0.5, 0.7, 3.0}) {
        const Complex v = mellin_forward(h, p, std::nullopt, kinks);
        EXPECT_NEAR(v.real(), std::expm1(p) / p, 1e-10) << p;
    }
}

TEST(MellinForward, DivergenceIsStripError) {
    const double kink[] = {1.0};
    EXPECT_EQ(kind_of([&] {
                  mellin_forward([](double x) { return std::max(x - 1.0, 0.0); }, -1.0, std::nullopt, kink);
              }),
              ErrorKind::kStrip);
    EXPECT_EQ(kind_of([&] {
                  mellin_forward([](double x) { return x; }, -2.0, std::make_pair(-3.0, -1.5));
              }),
              ErrorKind::kStrip);
}

TEST(PayoffTransform, ClosedValues) {
    EXPECT_NEAR(payoff_transform_call(1.0, -2.0).real(), 0.5, 1e-15);
    EXPECT_NEAR(payoff_transform_call(100.0, -2.0).real(), 0.005, 1e-17);
    EXPECT_EQ(kind_of([] { payoff_transform_call(1.0, -1.0); }), ErrorKind::kStrip);
    EXPECT_EQ(kind_of([] { payoff_transform_call(1.0, Complex(-0.5, 3.0)); }), ErrorKind::kStrip);
    EXPECT_EQ(kind_of([] { payoff_transform_call(1.0, -3.2); }), ErrorKind::kStrip);
}

TEST(PayoffTransform, ForwardQuadratureFarFromRealAxis) {
    const double kink[] = {100.0};
    for (Complex p : {Complex(-2.8, -12.0), Complex(-1.2, -12.0), Complex(-1.2, 6.0)}) {
        const Complex q = mellin_forward([](double x) { return std::max(x - 100.0, 0.0); }, p, std::nullopt, kink);
        const Complex c = payoff_transform_call(100.0, p);
        EXPECT_LT(std::abs(q - c), 1e-9 * std::abs(c)) << p;
    }
}

TEST(PayoffTransform, MatchesForwardQuadrature) {
    const double kink[] = {100.0};
    for (Complex p : {Complex(-2.0, 0.0), Complex(-1.5, 2.0), Complex(-2.5, -7.0)}) {
        const Complex q = mellin_forward([](double x) { return std::max(x - 100.0, 0.0); }, p, std::nullopt, kink);
        EXPECT_NEAR(std::abs(q - payoff_transform_call(100.0, p)), 0.0, 1e-12) << p;
    }
}

TEST(KernelTransform, FixedPoints) {
    const PricingKernel k(kBase.step());
    EXPECT_NEAR(std::abs(kernel_transform(k, 0.0) - std::exp(-0.0009)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(kernel_transform(k, 1.0) - 1.0), 0.0, 1e-14);
    EXPECT_EQ(kind_of([&] { kernel_transform(k, 3.5); }), ErrorKind::kStrip);
}

TEST(KernelTransform, MatchesQuadrature) {
    const PricingKernel k(kBase.step());
    for (Complex p : {Complex(-2.0, 0.0), Complex(-1.0, 15.0), Complex(2.5, -4.0)}) {
        const Complex q = oracle::gauss([&](double x) { return std::exp(p * x) * kRef(x); }, kRef.lo(),
                                        kRef.hi(), 80);
        EXPECT_NEAR(std::abs(kernel_transform(k, p) - q), 0.0, 1e-9) << p;
    }
}

TEST(ProductTransform, EmptyAndSingleFactor) {
    const auto path = kBase.path();
    const PricingKernel k(path.step(0));
    for (Complex p : {Complex(-2.0, 0.0), Complex(-1.7, 3.0)}) {
        EXPECT_EQ(product_transform(path, 0, p), payoff_transform_call(100.0, p));
        EXPECT_NEAR(std::abs(product_transform(path, 1, p) - payoff_transform_call(100.0, p) * kernel_transform(k, -p)),
                    0.0, 1e-17);
    }
}

// Transform of the tabulated V_1 by cell-aligned Gauss-Legendre in y = ln(s/E).
TEST(ProductTransform, MatchesTransformOfOneStepGrid) {
    const auto path = kBase.path();
    const auto v1 = price_recursive_final(path, Payoff::call(100.0), 1);
    const double p = -2.0;
    auto integrand = [&](double y) { return std::pow(100.0, p) * std::exp(p * y) * v1.at_log(y); };
    const double h = v1.log_spacing();
    double q = 0.0;
    for (std::size_t i = 0; i + 1 < v1.size(); ++i) {
        const double a = v1.log_lo() + h * static_cast<double>(i);
        q += oracle::gauss(integrand, a, a + h, 1);
    }
    q += oracle::gauss(integrand, v1.log_hi(), v1.log_hi() + 60.0, 600);
    EXPECT_NEAR(q, product_transform(path, 1, p).real(), 1e-5 * q);
}

TEST(MellinInverse, PayoffRoundTrip) {
    MellinLine line;
    line.a0 = -2.0;
    EXPECT_NEAR(mellin_inverse(payoff_fn(100.0), line, 200.0), 100.0, 1e-6);
    EXPECT_NEAR(mellin_inverse(payoff_fn(100.0), line, 50.0), 0.0, 1e-6);
    EXPECT_NEAR(mellin_inverse(payoff_fn(100.0), line, 100.0), 0.0, 1e-3);
}

TEST(MellinInverse, IndependentOfAbscissa) {
    const auto f = product_transform_fn(kBase.path(), 4);
    for (double s : {80.0, 100.0, 125.0}) {
        MellinLine a, b;
        a.a0 = -1.5;
        b.a0 = -2.6;
        EXPECT_NEAR(mellin_inverse(f, a, s), mellin_inverse(f, b, s), 1e-9) << s;
    }
}

TEST(MellinInverse, LinearInTheTransform) {
    const auto f = product_transform_fn(kBase.path(), 2);
    const auto g = product_transform_fn(kBase.path(), 3);
    const TransformFn h{[&](Complex p) { return 2.0 * f(p) - 0.5 * g(p); }, -3.0, -1.0};
    for (double s : {90.0, 110.0}) {
        EXPECT_NEAR(mellin_inverse(h, {}, s), 2.0 * mellin_inverse(f, {}, s) - 0.5 * mellin_inverse(g, {}, s), 1e-9);
    }
}

TEST(ProductTransform, ConjugateSymmetric) {
    const auto f = product_transform_fn(kBase.path(), 4);
    for (double t : {0.3, 5.0, 60.0}) {
        EXPECT_NEAR(std::abs(f(Complex(-2.0, t)) - std::conj(f(Complex(-2.0, -t)))), 0.0, 1e-18);
    }
}

TEST(MellinInverse, TruncationTooShortIsContourError) {
    MellinLine line;
    line.a0 = -2.0;
    line.p_max = 2.0;
    EXPECT_EQ(kind_of([&] { mellin_inverse(payoff_fn(100.0), line, 150.0); }), ErrorKind::kContour);
    line.p_max = 0.0;
    line.a0 = -0.5;
    EXPECT_EQ(kind_of([&] { mellin_inverse(payoff_fn(100.0), line, 150.0); }), ErrorKind::kStrip);
}

TEST(PriceMellin, ZeroStepsIsPayoff) {
    const auto path = lognormal::Params{0.05, 0.2, 0.01, 0.09, 100.0, 0}.path();
    EXPECT_NEAR(price_mellin(path, 0, 150.0), 50.0, 1e-6);
}

TEST(PriceMellin, OnlyCallsAreSupported) {
    const auto path = kBase.path();
    EXPECT_EQ(kind_of([&] { price_mellin(path, Payoff::constant(1.0), 2, 100.0); }), ErrorKind::kUnsupportedPayoff);
    EXPECT_EQ(kind_of([&] { price_mellin(path, Payoff::call(90.0), 2, 100.0); }), ErrorKind::kUnsupportedPayoff);
    EXPECT_NEAR(price_mellin(path, Payoff::call(100.0), 2, 100.0), price_mellin(path, 2, 100.0), 1e-15);
}

TEST(GreenFunctionTest, MassIsDiscountFactor) {
    const GreenFunction g(kBase.path(), 4);
    EXPECT_NEAR(g.mass(), std::exp(-4 * 0.0009), 1e-6);
}

TEST(GreenFunctionTest, MatchesGaussianMixture) {
    const GreenFunction g(kBase.path(), 4);
    double worst = 0.0;
    for (double w = -0.3; w <= 0.3; w += 0.0025) {
        worst = std::max(worst, std::abs(g.at_log(w) - lognormal::green_closed(kBase, std::exp(w))));
    }
    EXPECT_LT(worst, 1e-6);
}

TEST(GreenFunctionTest, ConvolutionMatchesContourPrice) {
    const auto path = kBase.path();
    for (double s : {85.0, 100.0, 112.0}) {
        EXPECT_NEAR(green_price(path, 4, Payoff::call(100.0), s), price_mellin(path, 4, s), 1e-5) << s;
    }
    EXPECT_THROW(GreenFunction(path, 0), Error);
}
