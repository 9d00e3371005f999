#pragma once

// Minimal CSV ingestion for the CLI: one numeric column per series, selected
// by 0-based index, with a single optional header line auto-detected by
// failing to parse as a number.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lbd/errors.hpp"

namespace lbd {

struct CsvSeries {
    std::vector<double> values;
    // 1-based file line of each value, for error reporting.
    std::vector<std::int64_t> lines;
    bool had_header = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (field.empty()) return false;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

inline std::string_view nth_field(std::string_view line, int column) {
    int current = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            if (current == column) return line.substr(start, i - start);
            ++current;
            start = i + 1;
        }
    }
    return {};
}

}  // namespace detail

inline CsvSeries read_csv_series(std::istream& in, int column) {
    if (column < 0) throw invalid_argument_error("column index must be nonnegative");
    CsvSeries out;
    std::string line;
    std::int64_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const std::string_view field = detail::nth_field(line, column);
        double value = 0.0;
        if (!detail::parse_double(field, value)) {
            if (first_content_line) {
                out.had_header = true;
                first_content_line = false;
                continue;
            }
            std::ostringstream msg;
            msg << "cannot parse '" << std::string(detail::trim(field)) << "' as a number (line "
                << line_no << ")";
            throw invalid_data_error(msg.str(), static_cast<std::int64_t>(out.values.size()));
        }
        first_content_line = false;
        out.values.push_back(value);
        out.lines.push_back(line_no);
    }
    return out;
}

inline CsvSeries read_csv_series(const std::string& path, int column) {
    std::ifstream in(path);
    if (!in) throw invalid_data_error("cannot open input file: " + path);
    return read_csv_series(in, column);
}

}  // namespace lbd
