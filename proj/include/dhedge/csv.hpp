#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace dhedge::csv {

/// 17 significant digits: every double round-trips exactly.
std::string format(double v);

class Writer {
public:
    Writer(std::ostream& out, std::initializer_list<std::string> header);

    /// Writes one row; the cell count must match the header.
    void row(const std::vector<std::string>& cells);
    void row(std::initializer_list<double> cells);

private:
    std::ostream& out_;
    std::size_t columns_;
};

}  // namespace dhedge::csv
