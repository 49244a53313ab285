#pragma once

// Small parsing helpers shared by the line-oriented file formats.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "plantdoctor/errors.hpp"

namespace plantdoctor::text {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
    s = trim(s);
    T value{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        throw InvalidArgument("cannot parse " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return value;
}

inline double parse_double(std::string_view s, std::string_view what) { return parse_number<double>(s, what); }
inline long long parse_int(std::string_view s, std::string_view what) { return parse_number<long long>(s, what); }

inline std::vector<double> parse_doubles(std::string_view s, std::string_view what, std::size_t expected) {
    std::vector<double> out;
    for (auto part : split(s, ',')) {
        out.push_back(parse_double(part, what));
    }
    if (expected != 0 && out.size() != expected) {
        throw InvalidArgument(std::string(what) + " expects " + std::to_string(expected) + " comma-separated values");
    }
    return out;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Fixed two-decimal rendering, as used by every report table.
inline std::string format_fixed2(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    std::string s(buf, ptr);
    if (s == "-0.00") {
        s = "0.00";
    }
    return s;
}

}  // namespace plantdoctor::text
