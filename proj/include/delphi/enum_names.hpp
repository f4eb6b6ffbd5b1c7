#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>

#include "delphi/error.hpp"

namespace delphi {

/// Specialize with a `static constexpr std::array<std::pair<E, std::string_view>, N> entries`
/// and a `static constexpr std::string_view label` to get enum_name/parse_enum.
template <typename E>
struct EnumNames;

template <typename E>
constexpr std::string_view enum_name(E value) {
    for (const auto& [v, name] : EnumNames<E>::entries) {
        if (v == value) return name;
    }
    return "unknown";
}

template <typename E>
E parse_enum(std::string_view text) {
    for (const auto& [v, name] : EnumNames<E>::entries) {
        if (name == text) return v;
    }
    throw Error("invalid " + std::string(EnumNames<E>::label), std::string(text));
}

}  // namespace delphi
