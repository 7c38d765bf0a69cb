#include "dhedge/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace dhedge {

ExpansionEstimate estimate_expansion(const std::function<double(double)>& price_at_tau, double t,
                                     double s, int order, const std::vector<double>& tau_grid) {
    if (order < 0) fail(ErrorKind::kValidation, "expansion order must be >= 0");
    std::vector<double> taus = tau_grid;
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    if (static_cast<int>(taus.size()) < order + 2) {
        std::ostringstream msg;
        msg << "order " << order << " needs at least " << order + 2 << " distinct tau values";
        fail(ErrorKind::kValidation, msg.str());
    }
    for (double tau : taus) {
        const double steps = t / tau;
        if (!(tau > 0.0) || std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
            fail(ErrorKind::kValidation, "every tau must divide t into a whole number of steps");
        }
    }

    const auto rows = static_cast<Eigen::Index>(taus.size());
    Eigen::MatrixXd design(rows, order + 1);
    Eigen::VectorXd values(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double tau = taus[static_cast<std::size_t>(i)];
        double power = 1.0;
        for (int j = 0; j <= order; ++j) {
            design(i, j) = power;
            power *= tau;
        }
        values(i) = price_at_tau(tau);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                : std::numeric_limits<double>::infinity();
    if (cond > 1e10) {
        std::ostringstream msg;
        msg << "expansion fit is ill-conditioned (condition number " << cond
            << "); use fewer orders or a wider tau grid";
        fail(ErrorKind::kFit, msg.str());
    }
    const Eigen::VectorXd coef = svd.solve(values);
    const Eigen::VectorXd resid = values - design * coef;

    ExpansionEstimate est;
    est.t = t;
    est.s = s;
    est.tau_grid = taus;
    est.condition_number = cond;
    est.coefficients.assign(coef.data(), coef.data() + coef.size());
    est.values.assign(values.data(), values.data() + values.size());
    est.residuals.assign(resid.data(), resid.data() + resid.size());
    return est;
}

std::vector<double> default_tau_grid(double t) {
    std::vector<double> out;
    for (int n : {16, 32, 64, 128, 256}) out.push_back(t / n);
    return out;
}

ConvergenceReport bs_limit_check(const lognormal::Params& base, double maturity, double s,
                                 const std::vector<int>& ns) {
    if (ns.empty()) fail(ErrorKind::kValidation, "convergence sweep needs at least one n");
    ConvergenceReport report;
    report.reference = lognormal::black_scholes(s, maturity, base.strike, base.r, base.sigma);
    const double scale = std::max(std::abs(report.reference), 1e-300);

    for (int n : ns) {
        if (n < 1) fail(ErrorKind::kValidation, "convergence sweep needs n >= 1");
        lognormal::Params p = base;
        p.n = n;
        p.tau = maturity / n;
        ConvergenceRow row;
        row.n = n;
        row.tau = p.tau;
        row.value = lognormal::price_closed(p, s);
        row.error = std::abs(row.value - report.reference);
        row.local_order = std::numeric_limits<double>::quiet_NaN();
        if (!report.rows.empty()) {
            const auto& prev = report.rows.back();
            if (prev.error > 0.0 && row.error > 0.0) {
                row.local_order = std::log(prev.error / row.error) / std::log(prev.tau / row.tau);
            }
            if (!(row.error < prev.error)) report.monotone = false;
        }
        report.rows.push_back(row);
    }

    // Errors below rounding carry no order information (e.g. sigma -> 0).
    const double floor = 1e-12 * scale;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int used = 0;
    for (const auto& row : report.rows) {
        if (row.error <= floor) continue;
        const double x = std::log(row.tau);
        const double y = std::log(row.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++used;
    }
    if (used >= 2) {
        report.order = (used * sxy - sx * sy) / (used * sxx - sx * sx);
    } else {
        report.order = std::numeric_limits<double>::quiet_NaN();
        report.monotone = true;
    }
    report.final_relative_error = report.rows.back().error / scale;
    return report;
}

}  // namespace dhedge
