#include "oscchain/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oscchain::csv {

std::string format_value(double v) {
    if (!std::isfinite(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const Table& table, const std::filesystem::path& path) {
    for (const auto& col : table.columns)
        if (col.size() != table.columns.front().size())
            throw std::invalid_argument("csv: ragged columns");
    if (table.header.size() != table.columns.size() && !table.columns.empty())
        throw std::invalid_argument("csv: header/column count mismatch");

    std::ofstream os(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!os) throw std::ios_base::failure("csv: cannot open " + path.string());
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c) os << ',';
        os << table.header[c];
    }
    os << '\n';
    const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) os << ',';
            os << format_value(table.columns[c][r]);
        }
        os << '\n';
    }
    os.flush();
    if (!os) throw std::ios_base::failure("csv: write failed for " + path.string());
}

Table parse(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::ios_base::failure("csv: cannot open " + path.string());
    Table t;
    std::string line;
    if (!std::getline(is, line)) return t;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    t.columns.resize(t.header.size());
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // an empty line is a row of one empty field in a 1-column table
        if (line.empty() && t.columns.size() != 1) continue;
        std::stringstream ls(line);
        std::size_t c = 0;
        while (std::getline(ls, cell, ',')) {
            if (c >= t.columns.size()) throw std::runtime_error("csv: too many fields");
            t.columns[c].push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                : std::stod(cell));
            ++c;
        }
        // a trailing empty field is eaten by getline; restore it
        while (c < t.columns.size()) {
            t.columns[c].push_back(std::numeric_limits<double>::quiet_NaN());
            ++c;
        }
    }
    return t;
}

}  // namespace oscchain::csv
