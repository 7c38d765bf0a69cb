#include "dhedge/csv.hpp"

#include <cmath>
#include <cstdio>

#include "dhedge/common.hpp"

namespace dhedge::csv {

std::string format(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Writer::Writer(std::ostream& out, std::initializer_list<std::string> header)
    : out_(out), columns_(header.size()) {
    bool first = true;
    for (const auto& h : header) {
        out_ << (first ? "" : ",") << h;
        first = false;
    }
    out_ << '\n';
}

void Writer::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) fail(ErrorKind::kValidation, "CSV row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
}

void Writer::row(std::initializer_list<double> cells) {
    std::vector<std::string> text;
    text.reserve(cells.size());
    for (double c : cells) text.push_back(format(c));
    row(text);
}

}  // namespace dhedge::csv
