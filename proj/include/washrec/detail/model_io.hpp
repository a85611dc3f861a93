#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "washrec/csv.hpp"
#include "washrec/errors.hpp"
#include "washrec/features.hpp"

namespace washrec::detail {

inline void write_standardizer(std::ostream& out, const std::optional<Standardizer>& s) {
    if (!s) {
        out << "standardizer 0\n";
        return;
    }
    out << "standardizer 1\nmeans";
    for (double v : s->means()) out << ' ' << csv::fmt_hex(v);
    out << "\nscales";
    for (double v : s->scales()) out << ' ' << csv::fmt_hex(v);
    out << '\n';
}

// Reads one space-separated record whose first token must equal `head`.
inline std::vector<std::string> expect_line(std::istream& in, const std::string& head,
                                            std::size_t& line_no) {
    std::string line;
    if (!csv::getline_any(in, line)) throw MalformedRow(line_no + 1, "unexpected end of model file");
    ++line_no;
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start < line.size()) {
        const auto pos = line.find(' ', start);
        if (pos == std::string::npos) {
            tokens.push_back(line.substr(start));
            break;
        }
        if (pos > start) tokens.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (tokens.empty() || tokens[0] != head)
        throw MalformedRow(line_no, "expected '" + head + "' record");
    return tokens;
}

inline std::optional<Standardizer> read_standardizer(std::istream& in, std::size_t& line_no,
                                                     std::size_t dims) {
    const auto flag = expect_line(in, "standardizer", line_no);
    if (flag.size() != 2) throw MalformedRow(line_no, "bad standardizer record");
    if (flag[1] == "0") return std::nullopt;
    const auto means = expect_line(in, "means", line_no);
    const auto scales = expect_line(in, "scales", line_no);
    if (means.size() != dims + 1 || scales.size() != dims + 1)
        throw MalformedRow(line_no, "standardizer dimension mismatch");
    std::vector<double> m(dims), sc(dims);
    for (std::size_t i = 0; i < dims; ++i) {
        m[i] = csv::parse_hex(means[i + 1], line_no);
        sc[i] = csv::parse_hex(scales[i + 1], line_no);
    }
    return Standardizer::from_moments(std::move(m), std::move(sc));
}

}  // namespace washrec::detail
