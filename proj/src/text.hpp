#pragma once

#include "climroom/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace climroom::detail {

inline std::vector<std::string> split_commas(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_optional_number(std::string_view token, std::string_view field,
                                                   std::size_t line)
{
    token = trim(token);
    if (token.empty()) return std::nullopt;
    if (token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value))
        throw ParseError(fmt::format("field {}: cannot parse '{}' as a number", field, token), line);
    return value;
}

inline double parse_number(std::string_view token, std::string_view field, std::size_t line)
{
    auto v = parse_optional_number(token, field, line);
    if (!v) throw ParseError(fmt::format("field {} is empty", field), line);
    return *v;
}

inline int parse_int(std::string_view token, std::string_view field, std::size_t line)
{
    const double v = parse_number(token, field, line);
    if (v != std::floor(v))
        throw ParseError(fmt::format("field {} must be an integer, got '{}'", field, token), line);
    return static_cast<int>(v);
}

} // namespace climroom::detail
