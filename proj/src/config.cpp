#include "dhedge/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dhedge/common.hpp"

namespace dhedge {

namespace pt = boost::property_tree;

Method parse_method(const std::string& name) {
    if (name == "recursive") return Method::kRecursive;
    if (name == "mellin") return Method::kMellin;
    if (name == "green") return Method::kGreen;
    if (name == "closed") return Method::kClosed;
    fail(ErrorKind::kValidation,
         "unknown method '" + name + "' (expected recursive, mellin, green or closed)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::kRecursive: return "recursive";
        case Method::kMellin: return "mellin";
        case Method::kGreen: return "green";
        case Method::kClosed: return "closed";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        fail(ErrorKind::kValidation, key + ": '" + raw + "' is not a decimal number");
    }
    return v;
}

template <class Int>
Int to_int(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        fail(ErrorKind::kValidation, key + ": '" + raw + "' is not an integer");
    }
    return v;
}

std::vector<int> to_int_list(const std::string& key, const std::string& raw) {
    std::vector<int> out;
    std::stringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(to_int<int>(key, item));
    if (out.empty()) fail(ErrorKind::kValidation, key + ": empty list");
    return out;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> get(const std::string& key) const {
        if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return *v;
        return std::nullopt;
    }
    std::string require(const std::string& key) const {
        auto v = get(key);
        if (!v) fail(ErrorKind::kValidation, "missing required key " + key);
        return *v;
    }
    double number(const std::string& key) const { return to_double(key, require(key)); }
    void maybe(const std::string& key, double& out) const {
        if (auto v = get(key)) out = to_double(key, *v);
    }
    template <class Int>
    void maybe_int(const std::string& key, Int& out) const {
        if (auto v = get(key)) out = to_int<Int>(key, *v);
    }

private:
    const pt::ptree& tree_;
};

}  // namespace

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::kValidation, std::string("config: ") + e.what());
    }
    const Reader in(tree);
    RunConfig cfg;

    auto& m = cfg.model;
    m.mu = in.number("model.mu");
    m.sigma = in.number("model.sigma");
    m.r = in.number("model.r");
    m.tau = in.number("model.tau");
    m.n = to_int<int>("model.n", in.require("model.n"));
    m.strike = in.number("model.strike");
    if (auto dist = in.get("model.distribution"); dist && trim(*dist) != "lognormal") {
        fail(ErrorKind::kValidation, "model.distribution: only 'lognormal' is configurable");
    }
    lognormal::validate(m);

    if (auto spot = in.get("model.spot")) {
        cfg.spots.push_back(to_double("model.spot", *spot));
    } else if (in.get("model.spot_lo")) {
        const double lo = in.number("model.spot_lo");
        const double hi = in.number("model.spot_hi");
        const int count = to_int<int>("model.spot_count", in.require("model.spot_count"));
        if (count < 1 || hi < lo) fail(ErrorKind::kValidation, "spot grid needs spot_count >= 1 and spot_hi >= spot_lo");
        for (int i = 0; i < count; ++i) {
            cfg.spots.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
        }
    } else {
        cfg.spots.push_back(m.strike);
    }
    for (double s : cfg.spots) {
        if (!(s > 0.0)) fail(ErrorKind::kValidation, "spot prices must be positive");
    }

    if (auto name = in.get("method.name")) cfg.method = parse_method(trim(*name));

    in.maybe("contour.a", cfg.moment_bound);
    if (!(cfg.moment_bound > 2.0)) {
        fail(ErrorKind::kValidation, "contour.a: the moment bound must satisfy a > 2");
    }
    if (auto a0 = in.get("contour.a0")) {
        const double v = to_double("contour.a0", *a0);
        if (!(v > 1.0 - cfg.moment_bound && v < -1.0)) {
            fail(ErrorKind::kValidation, "contour.a0 must lie in (1 - a, -1)");
        }
        cfg.contour.a0 = v;
    }
    in.maybe("contour.p_max", cfg.contour.p_max);
    in.maybe_int("contour.nodes", cfg.contour.nodes);

    in.maybe_int("grid.nodes", cfg.grid.nodes);
    in.maybe("grid.half_width", cfg.grid.half_width);
    if (cfg.grid.nodes < 4) fail(ErrorKind::kValidation, "grid.nodes must be >= 4");

    in.maybe_int("mc.paths", cfg.mc_paths);
    in.maybe_int("mc.seed", cfg.mc_seed);
    in.maybe_int("mc.k", cfg.mc_k);
    in.maybe("mc.spread", cfg.mc_spread);
    in.maybe_int("mc.points", cfg.mc_points);

    if (auto ns = in.get("converge.ns")) cfg.converge_ns = to_int_list("converge.ns", *ns);
    in.maybe_int("asymptote.order", cfg.asymptote_order);
    if (auto ns = in.get("asymptote.ns")) cfg.asymptote_ns = to_int_list("asymptote.ns", *ns);

    in.maybe("crosscheck.tolerance", cfg.crosscheck_tolerance);
    if (auto out = in.get("output.path")) cfg.output_path = trim(*out);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::kValidation, "cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace dhedge
