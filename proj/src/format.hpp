#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace epps
{

/// Shortest text that reads back to the same double; NaN prints as "NaN".
inline std::string format_number(double x)
{
    if (std::isnan(x))
        return "NaN";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

} // namespace epps
