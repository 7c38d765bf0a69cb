#include <iostream>

#include <CLI11.hpp>

#include "dhedge/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Discrete-hedging option pricer"};
    app.require_subcommand(1, 1);

    dhedge::cli::Options opts;
    std::string method;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    const char* names[][2] = {
        {"price", "V_n on the spot grid for the chosen method"},
        {"delta", "minimum-variance hedge ratio at the first rebalance"},
        {"feasibility", "rate interval keeping prices non-negative"},
        {"crosscheck", "recursive vs Mellin vs closed form"},
        {"xi-scan", "negative-value regions of every V_k"},
        {"bs-converge", "convergence to Black-Scholes as tau -> 0"},
        {"simulate", "Monte Carlo statistics of the hedged portfolio"},
        {"asymptote", "small-tau expansion coefficients"},
    };
    for (const auto& [name, help] : names) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.config_path, "INI run configuration")->required();
        sub->add_option("--out", opts.out_path, "write CSV here instead of stdout");
        sub->add_option("--method", method, "recursive | mellin | green | closed");
        sub->add_option("--tolerance", tolerance, "crosscheck relative tolerance");
        sub->add_option("--seed", seed, "Monte Carlo seed");
        sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dhedge::cli::kExitValidation;
    }

    CLI::App* sub = app.get_subcommands().front();
    opts.command = sub->get_name();
    if (sub->count("--method")) opts.method = method;
    if (sub->count("--tolerance")) opts.tolerance = tolerance;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--threads")) opts.threads = threads;
    return dhedge::cli::run(opts, std::cout, std::cerr);
}
