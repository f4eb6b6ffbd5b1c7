#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

#include "delphi/error.hpp"

namespace delphi {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text));
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::exception&) {
        throw Error("invalid rational", text);
    }
}

/// Percentage of count/total in tenths of a percent, rounded half up.
/// 60/159 -> 377 (37.7%).
inline std::int64_t percent_tenths(std::int64_t count, std::int64_t total) {
    if (total <= 0) return 0;
    return (2000 * count + total) / (2 * total);
}

inline std::string format_percent(std::int64_t count, std::int64_t total) {
    const auto tenths = percent_tenths(count, total);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

inline std::string format_percent(const Rational& r) {
    return format_percent(r.numerator(), r.denominator());
}

}  // namespace delphi
