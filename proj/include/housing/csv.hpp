#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace housing {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Split one CSV line on commas. No quoting support: none of the file formats
/// here embed commas in fields.
inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

/// Read a CSV file into rows of fields. Skips blank lines and '#' comment
/// lines (provenance headers). The first surviving row is the column header.
inline std::vector<std::vector<std::string>> csv_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(csv_split(line));
    }
    return rows;
}

inline double csv_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw CsvError("bad numeric field '" + s + "' in " + context);
    }
}

inline long csv_long(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw CsvError("bad integer field '" + s + "' in " + context);
    }
}

/// Shortest decimal form that parses back to exactly the same double; used
/// everywhere a file must be byte-stable across reruns and re-readable
/// without loss.
inline std::string fmt_double(double v) {
    char buf[64];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace housing
