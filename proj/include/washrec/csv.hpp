#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "washrec/errors.hpp"

namespace washrec::csv {

// Reads one line, accepting LF or CRLF endings. Returns false at EOF.
inline bool getline_any(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

// Locale-independent numeric parsing; the whole field must be consumed.
inline double parse_double(const std::string& field, std::size_t line_no) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw MalformedRow(line_no, "cannot parse '" + field + "' as a number");
    return value;
}

inline long long parse_int(const std::string& field, std::size_t line_no) {
    long long value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw MalformedRow(line_no, "cannot parse '" + field + "' as an integer");
    return value;
}

// Shortest representation that parses back to the identical double.
inline std::string fmt(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string fmt_fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

// Hexadecimal float form for bit-exact round trips in model files.
inline std::string fmt_hex(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

inline double parse_hex(const std::string& field, std::size_t line_no) {
    std::string_view s = field;
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s.remove_prefix(2);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value,
                                           std::chars_format::hex);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        // fall through for inf/nan spellings
        if (s == "inf" || s == "infinity") value = std::numeric_limits<double>::infinity();
        else if (s.substr(0, 3) == "nan") value = std::numeric_limits<double>::quiet_NaN();
        else throw MalformedRow(line_no, "cannot parse '" + field + "' as a hex float");
    }
    return neg ? -value : value;
}

}  // namespace washrec::csv
