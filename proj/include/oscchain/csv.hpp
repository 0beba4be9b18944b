// Bit-stable CSV emission: RFC-4180 style, '.' decimal separator, 17
// significant digits, header row, LF line endings. Non-finite values are
// written as empty fields (used for flagged ratios) and parse back as NaN.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace oscchain::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;  // equal lengths
};

std::string format_value(double v);  // "%.17g", empty for non-finite

void emit(const Table& table, const std::filesystem::path& path);  // throws std::ios_base::failure

Table parse(const std::filesystem::path& path);

}  // namespace oscchain::csv
