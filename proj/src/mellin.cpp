#include "dhedge/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dhedge/quadrature.hpp"

namespace dhedge::mellin {

namespace {

[[noreturn]] void strip_error(const std::string& what, double re, double lo, double hi) {
    std::ostringstream msg;
    msg << what << ": Re p = " << re << " outside the strip (" << lo << ", " << hi << ")";
    fail(ErrorKind::kStrip, msg.str());
}

// Integral of g over [lo, hi] split at the interior log-kinks. `scale` is
// the magnitude of the whole transform so far; far-tail chunks only need
// to be accurate relative to it.
Complex chunk_integral(const std::function<Complex(double)>& g, double lo, double hi,
                       std::span<const double> log_kinks, double scale = 0.0) {
    const double tol = std::max(1e-300, 1e-13 * scale);
    const auto breaks = quad::breakpoints(lo, hi, log_kinks);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        re += quad::adaptive([&](double y) { return g(y).real(); }, breaks[b], breaks[b + 1], tol);
        im += quad::adaptive([&](double y) { return g(y).imag(); }, breaks[b], breaks[b + 1], tol);
    }
    return {re, im};
}

}  // namespace

Complex mellin_forward(const std::function<double(double)>& h, Complex p,
                       std::optional<std::pair<double, double>> strip,
                       std::span<const double> kinks) {
    if (strip && !(p.real() > strip->first && p.real() < strip->second)) {
        strip_error("mellin_forward", p.real(), strip->first, strip->second);
    }
    std::vector<double> log_kinks;
    for (double k : kinks) {
        if (k > 0.0) log_kinks.push_back(std::log(k));
    }
    // x = e^y: integral of e^{p y} h(e^y) dy, accumulated outward in unit
    // chunks from the centre until three consecutive chunks are negligible.
    const double centre = log_kinks.empty() ? 0.0 : log_kinks.front();
    const auto g = [&](double y) { return std::exp(p * y) * h(std::exp(y)); };
    constexpr int kMaxChunks = 600;
    Complex total = chunk_integral(g, centre - 1.0, centre + 1.0, log_kinks);
    for (int dir : {+1, -1}) {
        int quiet = 0;
        int j = 1;
        for (; j <= kMaxChunks && quiet < 3; ++j) {
            const double a = centre + dir * j;
            const double b = centre + dir * (j + 1);
            const Complex c = chunk_integral(g, std::min(a, b), std::max(a, b), log_kinks, std::abs(total));
            total += c;
            if (!std::isfinite(total.real()) || !std::isfinite(total.imag())) break;
            quiet = std::abs(c) <= 1e-16 * std::abs(total) ? quiet + 1 : 0;
        }
        if (quiet < 3) {
            std::ostringstream msg;
            msg << "mellin_forward: integrand does not decay on the "
                << (dir > 0 ? "x -> inf" : "x -> 0") << " side at Re p = " << p.real()
                << "; p is outside the strip of convergence";
            fail(ErrorKind::kStrip, msg.str());
        }
    }
    return total;
}

Complex payoff_transform_call(double strike, Complex p, double moment_bound) {
    const double lo = 1.0 - moment_bound;
    if (!(p.real() > lo && p.real() < -1.0)) strip_error("payoff_transform_call", p.real(), lo, -1.0);
    return std::exp((p + 1.0) * std::log(strike)) / (p * (p + 1.0));
}

Complex kernel_transform(const PricingKernel& kern, Complex p) {
    const auto& dist = kern.step().dist;
    const double a = dist.moment_bound();
    if (!(p.real() >= 1.0 - a && p.real() <= a - 1.0)) {
        strip_error("kernel_transform", p.real(), 1.0 - a, a - 1.0);
    }
    const Complex mp = dist.mgf(p);
    const Complex mp1 = dist.mgf(p + 1.0);
    return (mp1 - kern.m() * mp) * kern.tilt() + kern.discount() * mp;
}

namespace {

std::vector<PricingKernel> kernels(const MarketPath& path, int k) {
    if (k < 0 || k > path.size()) fail(ErrorKind::kValidation, "step index out of range");
    std::vector<PricingKernel> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m) out.emplace_back(path.step(m));
    return out;
}

Complex kernel_product(const std::vector<PricingKernel>& kerns, Complex p) {
    Complex prod(1.0, 0.0);
    for (const auto& kern : kerns) prod *= kernel_transform(kern, -p);
    return prod;
}

}  // namespace

Complex product_transform(const MarketPath& path, int k, Complex p) {
    const auto kerns = kernels(path, k);
    return payoff_transform_call(path.strike(), p, path.moment_bound()) * kernel_product(kerns, p);
}

TransformFn product_transform_fn(const MarketPath& path, int k) {
    auto kerns = kernels(path, k);
    const double a = path.moment_bound();
    const double strike = path.strike();
    return TransformFn{
        [kerns = std::move(kerns), a, strike](Complex p) {
            return payoff_transform_call(strike, p, a) * kernel_product(kerns, p);
        },
        1.0 - a, -1.0};
}

TransformFn green_transform_fn(const MarketPath& path, int k) {
    auto kerns = kernels(path, k);
    const double a = path.moment_bound();
    return TransformFn{[kerns = std::move(kerns)](Complex p) { return kernel_product(kerns, p); },
                       1.0 - a, a - 1.0};
}

namespace {

// Trapezoid samples F(a0 + i t_j), t_j = j * P / N, j = 0..N.
class ContourSampler {
public:
    ContourSampler(const TransformFn& f, double a0, double p_max, long intervals)
        : f_(f), a0_(a0), p_max_(p_max) {
        samples_.resize(static_cast<std::size_t>(intervals) + 1);
        for (long j = 0; j <= intervals; ++j) samples_[static_cast<std::size_t>(j)] = f_(node(j, intervals));
    }

    long intervals() const { return static_cast<long>(samples_.size()) - 1; }
    double dt() const { return p_max_ / static_cast<double>(intervals()); }

    void refine() {
        const long n = intervals();
        std::vector<Complex> next(static_cast<std::size_t>(2 * n) + 1);
        for (long j = 0; j <= n; ++j) next[static_cast<std::size_t>(2 * j)] = samples_[static_cast<std::size_t>(j)];
        for (long j = 0; j < n; ++j) {
            next[static_cast<std::size_t>(2 * j + 1)] = f_(node(2 * j + 1, 2 * n));
        }
        samples_ = std::move(next);
    }

    // (1/pi) integral_0^P F(a0+it) x^{-a0-it} dt; its real part is the inverse.
    Complex integrate(double log_x) const {
        const long n = intervals();
        const double h = dt();
        const double scale = std::exp(-a0_ * log_x);
        Complex sum(0.0, 0.0);
        for (long j = 0; j <= n; ++j) {
            const double w = (j == 0 || j == n) ? 0.5 : 1.0;
            const double t = h * static_cast<double>(j);
            sum += w * samples_[static_cast<std::size_t>(j)] * std::polar(1.0, -t * log_x);
        }
        return sum * (h * scale / std::numbers::pi);
    }

    // Estimated contribution of (P, inf): |g(P)| / pi times min(P, 1/omega),
    // omega being the local phase rate of the integrand at the cut.
    double tail(double log_x) const {
        const long n = intervals();
        const double h = dt();
        const double scale = std::exp(-a0_ * log_x);
        const Complex g1 = samples_[static_cast<std::size_t>(n)] * std::polar(1.0, -p_max_ * log_x);
        const Complex g0 =
            samples_[static_cast<std::size_t>(n - 1)] * std::polar(1.0, -(p_max_ - h) * log_x);
        const double mag = std::abs(g1) * scale / std::numbers::pi;
        double omega = 0.0;
        if (std::abs(g0) > 0.0 && std::abs(g1) > 0.0) omega = std::abs(std::arg(g1 / g0)) / h;
        const double reach = omega > 0.0 ? std::min(p_max_, 1.0 / omega) : p_max_;
        return mag * reach;
    }

private:
    Complex node(long j, long n) const {
        return {a0_, p_max_ * static_cast<double>(j) / static_cast<double>(n)};
    }

    const TransformFn& f_;
    double a0_;
    double p_max_;
    std::vector<Complex> samples_;
};

double resolve_a0(const TransformFn& f, const MellinLine& line) {
    const double a0 = line.a0 ? *line.a0 : 0.5 * (f.strip_lo + f.strip_hi);
    if (!f.in_strip(a0)) strip_error("mellin_inverse abscissa", a0, f.strip_lo, f.strip_hi);
    return a0;
}

double resolve_p_max(const TransformFn& f, const MellinLine& line, double a0) {
    if (line.p_max > 0.0) return line.p_max;
    const double ref = std::abs(f(Complex(a0, 0.0)));
    double p = 1.0;
    while (p < line.p_max_cap && std::abs(f(Complex(a0, p))) >= 1e-12 * ref) p *= 2.0;
    return std::min(p, line.p_max_cap);
}

}  // namespace

std::vector<Inversion> mellin_inverse(const TransformFn& f, const MellinLine& line,
                                      std::span<const double> xs) {
    for (double x : xs) {
        if (!(x > 0.0)) fail(ErrorKind::kDomain, "mellin_inverse needs x > 0");
    }
    const double a0 = resolve_a0(f, line);
    const double p_max = resolve_p_max(f, line, a0);
    long n0 = static_cast<long>(std::ceil(4.0 * p_max / std::numbers::pi));
    n0 = std::max<long>(n0, line.nodes);
    n0 = std::max<long>(n0 + (n0 % 2), 2);

    ContourSampler sampler(f, a0, p_max, n0);
    std::vector<double> log_x(xs.size());
    std::transform(xs.begin(), xs.end(), log_x.begin(), [](double x) { return std::log(x); });
    std::vector<Complex> prev(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) prev[i] = sampler.integrate(log_x[i]);

    std::vector<Inversion> out(xs.size());
    for (int level = 0; level < line.max_doublings; ++level) {
        sampler.refine();
        bool converged = true;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const Complex cur = sampler.integrate(log_x[i]);
            const double change = std::abs(cur.real() - prev[i].real());
            out[i].value = cur.real();
            out[i].change = change;
            if (change > line.rel_tol * std::max(1.0, std::abs(cur.real()))) converged = false;
            prev[i] = cur;
        }
        if (converged) break;
        if (level + 1 == line.max_doublings) {
            std::ostringstream msg;
            msg << "mellin_inverse: trapezoid sums still changing after " << line.max_doublings
                << " doublings (" << sampler.intervals() << " intervals, P_max = " << p_max << ")";
            fail(ErrorKind::kContour, msg.str());
        }
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i].p_max = p_max;
        out[i].intervals = sampler.intervals();
        out[i].tail_estimate = sampler.tail(log_x[i]);
        if (out[i].tail_estimate > line.tail_tol * std::max(1.0, std::abs(out[i].value))) {
            std::ostringstream msg;
            msg << "mellin_inverse: truncation tail estimate " << out[i].tail_estimate << " at x = "
                << xs[i] << " exceeds tolerance; increase P_max (currently " << p_max << ")";
            fail(ErrorKind::kContour, msg.str());
        }
    }
    return out;
}

double mellin_inverse(const TransformFn& f, const MellinLine& line, double x) {
    const double xs[] = {x};
    return mellin_inverse(f, line, xs).front().value;
}

double price_mellin(const MarketPath& path, int k, double s, const MellinLine& line) {
    return mellin_inverse(product_transform_fn(path, k), line, s);
}

double price_mellin(const MarketPath& path, const Payoff& payoff, int k, double s,
                    const MellinLine& line) {
    if (payoff.kind != PayoffKind::kCall || payoff.strike != path.strike()) {
        fail(ErrorKind::kUnsupportedPayoff,
             "price_mellin has a closed payoff transform only for the call; use green_price");
    }
    return price_mellin(path, k, s, line);
}

GreenFunction::GreenFunction(const MarketPath& path, int k, const MellinLine& line, int nodes) {
    if (k < 1) fail(ErrorKind::kValidation, "Green function needs k >= 1");
    if (nodes < 8) fail(ErrorKind::kValidation, "Green function grid needs >= 8 nodes");
    double mean = 0.0;
    double var = 0.0;
    for (int m = 0; m < k; ++m) {
        mean += path.step(m).dist.mean();
        var += path.step(m).dist.variance();
    }
    // G(x) is the k-fold kernel convolution at -ln x; the kernel tilt moves
    // mass by at most one log variance per step.
    const double half = 12.0 * std::sqrt(var) + var;
    const double centre = -mean - 0.5 * var;
    const double lo = centre - half;
    const double h = 2.0 * half / (nodes - 1);
    std::vector<double> xs(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) xs[static_cast<std::size_t>(i)] = std::exp(lo + h * i);

    MellinLine glue = line;
    if (!glue.a0) glue.a0 = -0.5 * path.moment_bound();
    const auto inv = mellin_inverse(green_transform_fn(path, k), glue, xs);
    std::vector<double> values(inv.size());
    std::transform(inv.begin(), inv.end(), values.begin(), [](const Inversion& v) { return v.value; });
    interp_ = UniformCubic(lo, h, std::move(values), UniformCubic::Slopes::kCentered);
}

double GreenFunction::at_log(double w) const {
    if (w < log_lo() || w > log_hi()) return 0.0;
    return interp_(w);
}

double GreenFunction::operator()(double x) const {
    if (!(x > 0.0)) return 0.0;
    return at_log(std::log(x));
}

double GreenFunction::mass() const {
    const auto v = interp_.values();
    const double h = interp_.spacing();
    // Trapezoid on the tabulated nodes; G vanishes at both ends.
    double sum = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) sum += v[i];
    return sum * h;
}

double GreenFunction::convolve(const Payoff& payoff, double s) const {
    if (!(s > 0.0)) fail(ErrorKind::kDomain, "green convolution needs s > 0");
    // w = ln(s/y): V(s) = integral of G(e^w) V_0(s e^{-w}) dw.
    std::vector<double> cands;
    for (double k : payoff.kinks) {
        if (k > 0.0) cands.push_back(std::log(s / k));
    }
    const double h = interp_.spacing();
    for (std::size_t i = 1; i + 1 < interp_.size(); ++i) cands.push_back(log_lo() + h * static_cast<double>(i));
    const auto breaks = quad::breakpoints(log_lo(), log_hi(), cands);
    const auto est = quad::simpson_doubling(
        [&](double w) { return interp_(w) * payoff(s * std::exp(-w)); }, breaks,
        static_cast<int>(2 * breaks.size()), 1e-10, 1e-14 * (s + 1.0), 4);
    return est.value;
}

double green_price(const MarketPath& path, int k, const Payoff& payoff, double s,
                   const MellinLine& line) {
    if (k == 0) return payoff(s);
    return GreenFunction(path, k, line).convolve(payoff, s);
}

}  // namespace dhedge::mellin
