#include "dhedge/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dhedge/asymptotics.hpp"
#include "dhedge/common.hpp"
#include "dhedge/config.hpp"
#include "dhedge/csv.hpp"
#include "dhedge/kernel.hpp"
#include "dhedge/lognormal.hpp"
#include "dhedge/mc_oracle.hpp"
#include "dhedge/mellin.hpp"
#include "dhedge/negativity.hpp"

namespace dhedge::cli {

namespace {

using csv::format;

struct Context {
    RunConfig cfg;
    Options opts;
    std::ostream& out;
    std::ostream& err;
};

Method require_method(const Context& c) {
    if (c.opts.method) return parse_method(*c.opts.method);
    if (c.cfg.method) return *c.cfg.method;
    fail(ErrorKind::kValidation, "no method selected: set [method] name or pass --method");
}

/// V_n at every configured spot for the given parameters.
std::vector<double> price_spots(const RunConfig& cfg, const lognormal::Params& p, Method method,
                                const std::vector<double>& spots) {
    const Payoff call = Payoff::call(p.strike);
    std::vector<double> v(spots.size());
    if (p.n == 0) {
        for (std::size_t i = 0; i < spots.size(); ++i) v[i] = call(spots[i]);
        return v;
    }
    const MarketPath path = p.path(cfg.moment_bound);
    switch (method) {
        case Method::kRecursive: {
            v = price_recursive_at(path, call, p.n, spots, cfg.grid);
            break;
        }
        case Method::kMellin: {
            const auto inv = mellin::mellin_inverse(mellin::product_transform_fn(path, p.n),
                                                    cfg.contour, spots);
            for (std::size_t i = 0; i < spots.size(); ++i) v[i] = inv[i].value;
            break;
        }
        case Method::kGreen: {
            const mellin::GreenFunction g(path, p.n, cfg.contour);
            for (std::size_t i = 0; i < spots.size(); ++i) v[i] = g.convolve(call, spots[i]);
            break;
        }
        case Method::kClosed:
            for (std::size_t i = 0; i < spots.size(); ++i) v[i] = lognormal::price_closed(p, spots[i]);
            break;
    }
    return v;
}

int cmd_price(Context& c) {
    const auto v = price_spots(c.cfg, c.cfg.model, require_method(c), c.cfg.spots);
    csv::Writer w(c.out, {"s", "V"});
    for (std::size_t i = 0; i < v.size(); ++i) w.row({c.cfg.spots[i], v[i]});
    return kExitOk;
}

// Hedge ratio at the first rebalance: uses V_{n-1} and the step kernel.
int cmd_delta(Context& c) {
    const auto& p = c.cfg.model;
    if (p.n < 1) fail(ErrorKind::kValidation, "delta needs n >= 1");
    const MarketPath path = c.cfg.path();
    const PricingKernel kern(path.step(p.n - 1));
    const Payoff call = Payoff::call(p.strike);
    csv::Writer w(c.out, {"s", "delta"});
    if (p.n == 1) {
        for (double s : c.cfg.spots) w.row({s, min_variance_delta(call, s, kern)});
    } else {
        const PriceGrid grid = price_recursive_final(path, call, p.n - 1, c.cfg.grid);
        for (double s : c.cfg.spots) w.row({s, min_variance_delta(grid, s, kern)});
    }
    return kExitOk;
}

int cmd_feasibility(Context& c) {
    const MarketStep step = c.cfg.model.step(c.cfg.moment_bound);
    validate(step);
    const FeasibilityInterval iv = feasibility_interval(step);
    const double r = c.cfg.model.r;
    csv::Writer w(c.out, {"r_lo", "r_hi", "r", "verdict"});
    w.row({format(iv.r_lo), format(iv.r_hi), format(r), iv.contains(r) ? "feasible" : "infeasible"});
    return kExitOk;
}

int cmd_crosscheck(Context& c) {
    const double tol = c.opts.tolerance.value_or(c.cfg.crosscheck_tolerance);
    const auto& spots = c.cfg.spots;
    const auto rec = price_spots(c.cfg, c.cfg.model, Method::kRecursive, spots);
    const auto mel = price_spots(c.cfg, c.cfg.model, Method::kMellin, spots);
    const auto clo = price_spots(c.cfg, c.cfg.model, Method::kClosed, spots);
    // Relative to the closed form, floored so worthless states do not divide by ~0.
    const double floor = kNegativeTolerance * c.cfg.model.strike;
    csv::Writer w(c.out, {"s", "V_recursive", "V_mellin", "V_closed", "max_rel_diff"});
    double worst = 0.0;
    for (std::size_t i = 0; i < spots.size(); ++i) {
        const double scale = std::max(std::abs(clo[i]), floor);
        const double diff = std::max({std::abs(rec[i] - clo[i]), std::abs(mel[i] - clo[i]),
                                      std::abs(rec[i] - mel[i])}) / scale;
        worst = std::max(worst, diff);
        w.row({spots[i], rec[i], mel[i], clo[i], diff});
    }
    if (!(worst <= tol)) {
        c.err << "crosscheck: max relative difference " << format(worst) << " exceeds tolerance "
              << format(tol) << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}

int cmd_xi_scan(Context& c) {
    const auto grids = price_recursive(c.cfg.path(), Payoff::call(c.cfg.model.strike), c.cfg.grid);
    csv::Writer w(c.out, {"k", "s_lo", "s_hi", "min_value"});
    for (std::size_t k = 1; k < grids.size(); ++k) {
        const auto report = scan_negative_set(grids[k], negative_threshold(grids[k]));
        for (const auto& iv : report.intervals) {
            w.row({static_cast<double>(k), iv.s_lo, iv.s_hi, iv.min_value});
        }
    }
    return kExitOk;
}

int cmd_bs_converge(Context& c) {
    const auto report = bs_limit_check(c.cfg.model, c.cfg.model.maturity(), c.cfg.spots.front(),
                                       c.cfg.converge_ns);
    csv::Writer w(c.out, {"n", "tau", "V", "error", "order"});
    for (const auto& r : report.rows) {
        w.row({static_cast<double>(r.n), r.tau, r.value, r.error, r.local_order});
    }
    if (!report.monotone) {
        c.err << "bs-converge: errors do not decrease monotonically in n\n";
        return kExitNumeric;
    }
    return kExitOk;
}

// Portfolio V_k(s e^xi) - delta s e^xi over candidate deltas around the
// analytic hedge, common random numbers throughout.
int cmd_simulate(Context& c) {
    const auto& p = c.cfg.model;
    const int k = c.cfg.mc_k;
    if (k < 0 || k >= p.n) fail(ErrorKind::kValidation, "mc.k must satisfy 0 <= k < n");
    const MarketPath path = c.cfg.path();
    const PricingKernel kern(path.step(k));
    const Payoff call = Payoff::call(p.strike);
    const double s = c.cfg.spots.front();

    std::function<double(double)> v_k;
    double delta = 0.0;
    std::optional<PriceGrid> grid;
    if (k == 0) {
        v_k = call.value;
        delta = min_variance_delta(call, s, kern);
    } else {
        grid = price_recursive_final(path, call, k, c.cfg.grid);
        v_k = [&g = *grid](double x) { return g(x); };
        delta = min_variance_delta(*grid, s, kern);
    }
    mc::SimConfig sim;
    sim.n_paths = c.cfg.mc_paths;
    sim.seed = c.opts.seed.value_or(c.cfg.mc_seed);
    const auto deltas = c.cfg.mc_points > 1 ? mc::delta_grid_around(delta, c.cfg.mc_spread, c.cfg.mc_points)
                                            : std::vector<double>{delta};
    csv::Writer w(c.out, {"delta", "mean", "var", "stderr"});
    for (double d : deltas) {
        const auto r = mc::simulate_hedged_step(v_k, d, s, kern.step(), sim);
        w.row({r.delta, r.mean_pi, r.var_pi, r.stderr_mean});
    }
    return kExitOk;
}

int cmd_asymptote(Context& c) {
    const Method method = c.opts.method || c.cfg.method ? require_method(c) : Method::kClosed;
    const double t = c.cfg.model.maturity();
    const double s = c.cfg.spots.front();
    std::vector<double> taus;
    for (int n : c.cfg.asymptote_ns) {
        if (n < 1) fail(ErrorKind::kValidation, "asymptote.ns entries must be >= 1");
        taus.push_back(t / n);
    }
    auto price_at_tau = [&](double tau) {
        lognormal::Params p = c.cfg.model;
        p.tau = tau;
        p.n = static_cast<int>(std::lround(t / tau));
        return price_spots(c.cfg, p, method, {s}).front();
    };
    const auto est = estimate_expansion(price_at_tau, t, s, c.cfg.asymptote_order, taus);
    csv::Writer w(c.out, {"kind", "index", "value"});
    for (std::size_t i = 0; i < est.coefficients.size(); ++i) {
        w.row({"B", std::to_string(i), format(est.coefficients[i])});
    }
    for (std::size_t i = 0; i < est.residuals.size(); ++i) {
        w.row({"residual", std::to_string(i), format(est.residuals[i])});
    }
    w.row({"condition", "0", format(est.condition_number)});
    return kExitOk;
}

const std::map<std::string, int (*)(Context&)>& commands() {
    static const std::map<std::string, int (*)(Context&)> table{
        {"price", cmd_price},           {"delta", cmd_delta},
        {"feasibility", cmd_feasibility}, {"crosscheck", cmd_crosscheck},
        {"xi-scan", cmd_xi_scan},       {"bs-converge", cmd_bs_converge},
        {"simulate", cmd_simulate},     {"asymptote", cmd_asymptote},
    };
    return table;
}

}  // namespace

int run(const Options& opts, std::ostream& out, std::ostream& err) {
    try {
        const auto it = commands().find(opts.command);
        if (it == commands().end()) fail(ErrorKind::kValidation, "unknown command '" + opts.command + "'");
        if (opts.config_path.empty()) fail(ErrorKind::kValidation, "--config is required");
        if (opts.threads) set_worker_threads(*opts.threads);
        if (opts.tolerance && !(*opts.tolerance > 0.0)) fail(ErrorKind::kValidation, "--tolerance must be > 0");

        RunConfig cfg = load_config(opts.config_path);
        const std::string out_path = !opts.out_path.empty() ? opts.out_path : cfg.output_path;

        // Buffer the table so a failed command never leaves a partial file.
        std::ostringstream table;
        Context ctx{std::move(cfg), opts, table, err};
        const int code = it->second(ctx);
        if (out_path.empty()) {
            out << table.str();
        } else {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) fail(ErrorKind::kValidation, "cannot write " + out_path);
            file << table.str();
        }
        return code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_numeric() ? kExitNumeric : kExitValidation;
    }
}

}  // namespace dhedge::cli
