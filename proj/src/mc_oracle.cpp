#include "dhedge/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

namespace dhedge::mc {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kPhiloxW0;
            k[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c[0], hi0, lo0);
        mulhilo(kPhiloxM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

double keyed_uniform(std::uint64_t seed, std::uint64_t index) {
    const auto out = philox4x32(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0u, 0u},
        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    // 53 random bits, offset by half an ulp so 0 and 1 are never produced.
    const std::uint64_t bits = (static_cast<std::uint64_t>(out[0] >> 5) << 26) | (out[1] >> 6);
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

namespace {

// Inverse-CDF sampler for xi.
class ReturnSampler {
public:
    explicit ReturnSampler(const ReturnDistribution& dist) : dist_(dist) {
        if (dist.kind() == DistributionKind::kLognormal) return;
        constexpr int kCells = 8192;
        lo_ = dist.mean() - 12.0 * dist.stddev();
        h_ = 24.0 * dist.stddev() / kCells;
        cdf_.resize(kCells + 1, 0.0);
        double prev = dist.density(lo_);
        for (int i = 1; i <= kCells; ++i) {
            const double cur = dist.density(lo_ + h_ * i);
            cdf_[static_cast<std::size_t>(i)] = cdf_[static_cast<std::size_t>(i - 1)] + 0.5 * h_ * (prev + cur);
            prev = cur;
        }
        const double total = cdf_.back();
        for (double& c : cdf_) c /= total;
    }

    double operator()(double u) const {
        if (dist_.kind() == DistributionKind::kLognormal) {
            const double z = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
            return dist_.mean() + dist_.stddev() * z;
        }
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const auto i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf_.begin(), 1,
                                                                          static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
        const double span = cdf_[i] - cdf_[i - 1];
        const double frac = span > 0.0 ? (u - cdf_[i - 1]) / span : 0.5;
        return lo_ + h_ * (static_cast<double>(i - 1) + frac);
    }

private:
    const ReturnDistribution& dist_;
    double lo_ = 0.0;
    double h_ = 0.0;
    std::vector<double> cdf_;
};

// Shifted power sums of d = Pi - shift and x = s (e^xi - m).
struct Sums {
    double n = 0.0;
    double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
    double x1 = 0.0, x2 = 0.0, x3 = 0.0, x4 = 0.0;
    double dx = 0.0, dx2 = 0.0, dx3 = 0.0, d2x = 0.0, d2x2 = 0.0;

    void add(const Sums& o) {
        n += o.n;
        d1 += o.d1;
        d2 += o.d2;
        d3 += o.d3;
        d4 += o.d4;
        x1 += o.x1;
        x2 += o.x2;
        x3 += o.x3;
        x4 += o.x4;
        dx += o.dx;
        dx2 += o.dx2;
        dx3 += o.dx3;
        d2x += o.d2x;
        d2x2 += o.d2x2;
    }
};

constexpr std::uint64_t kBlock = 4096;

}  // namespace

HedgeReport simulate_hedged_step(const std::function<double(double)>& v_k, double delta, double s,
                                 const MarketStep& step, const SimConfig& cfg) {
    if (cfg.n_paths < 2) fail(ErrorKind::kValidation, "simulation needs at least 2 paths");
    if (!(s > 0.0)) fail(ErrorKind::kDomain, "simulation needs s > 0");
    const auto& dist = step.dist;
    const ReturnSampler sample(dist);
    const double m = std::exp(dist.log_mgf(1.0));
    const double shift = v_k(s * m) - delta * s * m;

    const std::uint64_t blocks = (cfg.n_paths + kBlock - 1) / kBlock;
    std::vector<Sums> partial(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        Sums acc;
        const std::uint64_t begin = b * kBlock;
        const std::uint64_t end = std::min<std::uint64_t>(begin + kBlock, cfg.n_paths);
        for (std::uint64_t i = begin; i < end; ++i) {
            const double xi = sample(keyed_uniform(cfg.seed, i));
            const double growth = std::exp(xi);
            const double pi = v_k(s * growth) - delta * s * growth;
            const double d = pi - shift;
            const double x = s * (growth - m);
            const double d2 = d * d;
            acc.n += 1.0;
            acc.d1 += d;
            acc.d2 += d2;
            acc.d3 += d2 * d;
            acc.d4 += d2 * d2;
            const double x2 = x * x;
            acc.x1 += x;
            acc.x2 += x2;
            acc.x3 += x2 * x;
            acc.x4 += x2 * x2;
            acc.dx += d * x;
            acc.dx2 += d * x2;
            acc.dx3 += d * x2 * x;
            acc.d2x += d2 * x;
            acc.d2x2 += d2 * x2;
        }
        partial[b] = acc;
    });
    Sums t;
    for (const auto& p : partial) t.add(p);

    const double n = t.n;
    const double mu1 = t.d1 / n;
    const double mu2 = t.d2 / n;
    const double mu3 = t.d3 / n;
    const double mu4 = t.d4 / n;
    const double var = (t.d2 - t.d1 * t.d1 / n) / (n - 1.0);
    const double central4 = mu4 - 4 * mu3 * mu1 + 6 * mu2 * mu1 * mu1 - 3 * mu1 * mu1 * mu1 * mu1;
    const double var_x = (t.x2 - t.x1 * t.x1 / n) / (n - 1.0);
    const double cov = (t.dx - t.d1 * t.x1 / n) / (n - 1.0);

    HedgeReport r;
    r.delta = delta;
    r.n_paths = cfg.n_paths;
    r.mean_pi = shift + mu1;
    r.var_pi = std::max(var, 0.0);
    r.stderr_mean = std::sqrt(r.var_pi / n);
    r.stderr_var = std::sqrt(std::max(central4 - var * var, 0.0) / n);
    if (var_x > 0.0) {
        r.fitted_delta = delta + cov / var_x;
        // Heteroscedasticity-consistent slope variance:
        // sum e_i^2 (x_i - xbar)^2 / (sum (x_i - xbar)^2)^2 with e = d - c - b x.
        const double b = cov / var_x;
        const double c = mu1 - b * t.x1 / n;
        const double xb = t.x1 / n;
        auto moment = [&](double s0, double s1, double s2) { return s2 - 2 * xb * s1 + xb * xb * s0; };
        const double sum_d2 = moment(t.d2, t.d2x, t.d2x2);
        const double sum_d = moment(t.d1, t.dx, t.dx2);
        const double sum_dx = moment(t.dx, t.dx2, t.dx3);
        const double sum_1 = moment(n, t.x1, t.x2);
        const double sum_x = moment(t.x1, t.x2, t.x3);
        const double sum_xx = moment(t.x2, t.x3, t.x4);
        const double meat = sum_d2 - 2 * c * sum_d - 2 * b * sum_dx + c * c * sum_1 + 2 * b * c * sum_x +
                            b * b * sum_xx;
        const double sxx = var_x * (n - 1.0);
        r.fitted_delta_stderr = std::sqrt(std::max(meat, 0.0)) / sxx;
    } else {
        r.fitted_delta = delta;
    }
    return r;
}

DeltaFit fit_optimal_delta(const std::function<double(double)>& v_k, double s,
                           const MarketStep& step, const SimConfig& cfg) {
    if (cfg.delta_grid.size() < 5) {
        fail(ErrorKind::kValidation, "delta grid needs at least 5 candidates");
    }
    DeltaFit fit;
    for (double delta : cfg.delta_grid) fit.rows.push_back(simulate_hedged_step(v_k, delta, s, step, cfg));

    // Least squares var = c0 + c1 delta + c2 delta^2, centred for conditioning.
    double centre = 0.0;
    for (double d : cfg.delta_grid) centre += d;
    centre /= static_cast<double>(cfg.delta_grid.size());
    double a[3][4] = {};
    for (const auto& row : fit.rows) {
        const double z = row.delta - centre;
        const double basis[3] = {1.0, z, z * z};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) a[i][j] += basis[i] * basis[j];
            a[i][3] += basis[i] * row.var_pi;
        }
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        if (a[col][col] == 0.0) fail(ErrorKind::kFit, "delta grid is degenerate");
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
        }
    }
    const double c1 = a[1][3] / a[1][1];
    const double c2 = a[2][3] / a[2][2];
    const auto [lo, hi] = std::minmax_element(cfg.delta_grid.begin(), cfg.delta_grid.end());
    if (!(c2 > 0.0)) fail(ErrorKind::kBracketing, "variance is not convex over the delta grid");
    fit.fitted_delta = centre - c1 / (2.0 * c2);
    if (fit.fitted_delta < *lo || fit.fitted_delta > *hi) {
        std::ostringstream msg;
        msg << "variance-minimizing delta " << fit.fitted_delta << " lies outside the grid ["
            << *lo << ", " << *hi << "]";
        fail(ErrorKind::kBracketing, msg.str());
    }
    fit.fitted_delta_stderr = fit.rows.front().fitted_delta_stderr;
    return fit;
}

std::vector<double> delta_grid_around(double center, double spread, int n_points) {
    if (n_points < 2) fail(ErrorKind::kValidation, "delta grid needs >= 2 points");
    std::vector<double> out;
    for (int i = 0; i < n_points; ++i) {
        const double f = -spread + 2.0 * spread * i / (n_points - 1);
        out.push_back(center * (1.0 + f));
    }
    return out;
}

}  // namespace dhedge::mc
