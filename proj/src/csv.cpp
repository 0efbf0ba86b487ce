#include "mvep/csv.hpp"

#include <cmath>
#include <cstdio>

#include "mvep/error.hpp"

namespace mvep::csv {

std::string number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Writer::Writer(const std::filesystem::path& path, std::initializer_list<std::string> header)
    : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw Error("cli", "cannot write '" + path.string() + "'");
    row(std::vector<std::string>(header));
}

void Writer::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) {
        throw Error("cli", "csv row has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(columns_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

}  // namespace mvep::csv
