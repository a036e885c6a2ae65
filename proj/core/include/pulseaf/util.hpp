#pragma once

#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "pulseaf/errors.hpp"

namespace pulseaf {

// Shortest decimal form that round-trips the exact double. Keeps CSV and
// report output byte-stable across runs.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    std::string owned(text);
    char* end = nullptr;
    const double v = std::strtod(owned.c_str(), &end);
    if (end == owned.c_str())
        raise(ErrorKind::Io, "not a number: '" + owned + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.emplace_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
        fields.back().pop_back();
    return fields;
}

} // namespace pulseaf
