#include "dhedge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <exception>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dhedge {

namespace {
unsigned g_worker_threads = 0;
}

void set_worker_threads(unsigned threads) { g_worker_threads = threads; }

unsigned worker_threads() {
    if (g_worker_threads != 0) return g_worker_threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t threads = std::min<std::size_t>(worker_threads(), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    // Static striping: thread t owns indices t, t + threads, ... The
    // exception from the lowest failing index is rethrown after join.
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::size_t> error_index(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) {
                try {
                    body(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                    error_index[t] = i;
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    std::size_t first = count;
    std::exception_ptr err;
    for (std::size_t t = 0; t < threads; ++t) {
        if (errors[t] && error_index[t] < first) {
            first = error_index[t];
            err = errors[t];
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace dhedge

namespace dhedge::quad {

double adaptive(const std::function<double(double)>& f, double lo, double hi, double abs_tol) {
    using boost::math::quadrature::gauss_kronrod;
    double error = 0.0;
    double l1 = 0.0;
    // Boost stops relative to the first-pass estimate, which cancellation can
    // make arbitrarily small; restate the target relative to it.
    const double rough = gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0.0, &error, &l1);
    const double target = std::max(abs_tol, 1e-13 * l1);
    const double rel = std::max(1e-13, 0.1 * target / std::max(std::abs(rough), 1e-300));
    const double value = gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, rel, &error, &l1);
    if (error > abs_tol && error > 1e-12 * l1) {
        std::ostringstream msg;
        msg << "adaptive quadrature on [" << lo << ", " << hi << "] did not reach tolerance "
            << abs_tol << " (error estimate " << error << ")";
        fail(ErrorKind::kNumeric, msg.str());
    }
    return value;
}

double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
    if (panels < 2 || panels % 2 != 0) fail(ErrorKind::kDomain, "simpson needs an even panel count");
    const double h = (hi - lo) / panels;
    double sum = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

std::vector<double> breakpoints(double lo, double hi, std::span<const double> candidates) {
    std::vector<double> out{lo, hi};
    for (double c : candidates) {
        if (c > lo && c < hi) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    const double tiny = 1e-14 * std::max(1.0, std::abs(hi - lo));
    out.erase(std::unique(out.begin(), out.end(),
                          [tiny](double a, double b) { return std::abs(a - b) <= tiny; }),
              out.end());
    if (out.back() != hi) out.back() = hi;
    return out;
}

NestedRule nested_simpson(std::span<const double> breaks, int coarse_panels) {
    NestedRule rule;
    if (breaks.size() < 2) return rule;
    const double total = breaks.back() - breaks.front();
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double lo = breaks[b];
        const double hi = breaks[b + 1];
        // Coarse panels per piece: even, at least 2.
        int cp = static_cast<int>(std::ceil(coarse_panels * (hi - lo) / total / 2.0)) * 2;
        cp = std::max(cp, 2);
        const int fp = 2 * cp;
        const double h = (hi - lo) / fp;
        const std::size_t first = rule.nodes.size();
        // Shared endpoint with the previous piece accumulates weights.
        const bool shared = first > 0;
        for (int i = 0; i <= fp; ++i) {
            const double wf = (i == 0 || i == fp) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            double wc = 0.0;
            if (i % 2 == 0) {
                const int j = i / 2;
                wc = (j == 0 || j == cp) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            }
            const double x = i == fp ? hi : lo + i * h;
            if (i == 0 && shared) {
                rule.fine.back() += wf * h / 3.0;
                rule.coarse.back() += wc * 2.0 * h / 3.0;
                continue;
            }
            rule.nodes.push_back(x);
            rule.fine.push_back(wf * h / 3.0);
            rule.coarse.push_back(wc * 2.0 * h / 3.0);
        }
    }
    return rule;
}

Estimate simpson_doubling(const std::function<double(double)>& f, std::span<const double> breaks,
                          int panels, double rel_tol, double abs_tol, int max_doublings) {
    Estimate est;
    for (int level = 0; level <= max_doublings; ++level) {
        const NestedRule rule = nested_simpson(breaks, panels << level);
        double fine = 0.0;
        double coarse = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double v = f(rule.nodes[i]);
            fine += rule.fine[i] * v;
            coarse += rule.coarse[i] * v;
        }
        est.value = fine;
        est.change = std::abs(fine - coarse);
        est.panels = 2 * (panels << level);
        if (est.change <= rel_tol * std::abs(fine) + abs_tol) return est;
    }
    std::ostringstream msg;
    msg << "Simpson quadrature did not converge after " << max_doublings
        << " doublings: last change " << est.change << " at value " << est.value;
    fail(ErrorKind::kNumeric, msg.str());
}

}  // namespace dhedge::quad
