#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delphi/error.hpp"
#include "delphi/rational.hpp"

namespace delphi {

/// The seven justification categories. Declaration order is the canonical
/// order used for output and tie-breaking.
enum class Category : std::uint8_t {
    conditional_general,
    conditional_population,
    conditional_temporal,
    evidence_based,
    experiential,
    pragmatic,
    principle_based,
};

inline constexpr std::size_t kCategoryCount = 7;

inline constexpr std::array<Category, kCategoryCount> kAllCategories{
    Category::conditional_general, Category::conditional_population,
    Category::conditional_temporal, Category::evidence_based,
    Category::experiential,        Category::pragmatic,
    Category::principle_based,
};

inline constexpr std::string_view to_string(Category c) {
    switch (c) {
        case Category::conditional_general: return "conditional_general";
        case Category::conditional_population: return "conditional_population";
        case Category::conditional_temporal: return "conditional_temporal";
        case Category::evidence_based: return "evidence_based";
        case Category::experiential: return "experiential";
        case Category::pragmatic: return "pragmatic";
        case Category::principle_based: return "principle_based";
    }
    return "unknown";
}

inline std::optional<Category> try_parse_category(std::string_view text) {
    for (auto c : kAllCategories) {
        if (to_string(c) == text) return c;
    }
    return std::nullopt;
}

inline Category parse_category(std::string_view text) {
    if (auto c = try_parse_category(text)) return *c;
    throw Error("unknown category", std::string(text));
}

/// Multi-label code set over the fixed category universe.
class ReasoningCodeSet {
public:
    ReasoningCodeSet() = default;
    ReasoningCodeSet(std::initializer_list<Category> cs) {
        for (auto c : cs) insert(c);
    }

    static ReasoningCodeSet from_bits(unsigned long bits) {
        ReasoningCodeSet s;
        s.bits_ = std::bitset<kCategoryCount>(bits);
        return s;
    }

    void insert(Category c) { bits_.set(static_cast<std::size_t>(c)); }
    void erase(Category c) { bits_.reset(static_cast<std::size_t>(c)); }
    bool contains(Category c) const { return bits_.test(static_cast<std::size_t>(c)); }
    bool empty() const { return bits_.none(); }
    std::size_t size() const { return bits_.count(); }
    unsigned long bits() const { return bits_.to_ulong(); }

    std::vector<Category> categories() const {
        std::vector<Category> out;
        for (auto c : kAllCategories) {
            if (contains(c)) out.push_back(c);
        }
        return out;
    }

    ReasoningCodeSet operator|(const ReasoningCodeSet& o) const { return from_bits((bits_ | o.bits_).to_ulong()); }
    ReasoningCodeSet operator&(const ReasoningCodeSet& o) const { return from_bits((bits_ & o.bits_).to_ulong()); }
    ReasoningCodeSet& operator|=(const ReasoningCodeSet& o) {
        bits_ |= o.bits_;
        return *this;
    }
    bool operator==(const ReasoningCodeSet& o) const { return bits_ == o.bits_; }

    /// "a;b;c" in canonical order.
    std::string join(char sep = ';') const {
        std::string out;
        for (auto c : categories()) {
            if (!out.empty()) out.push_back(sep);
            out += to_string(c);
        }
        return out;
    }

    static ReasoningCodeSet split(std::string_view text, char sep = ';') {
        ReasoningCodeSet s;
        std::size_t start = 0;
        while (start <= text.size()) {
            auto end = text.find(sep, start);
            if (end == std::string_view::npos) end = text.size();
            auto token = text.substr(start, end - start);
            while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
            while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
            if (!token.empty()) s.insert(parse_category(token));
            start = end + 1;
        }
        return s;
    }

private:
    std::bitset<kCategoryCount> bits_;
};

/// Jaccard overlap |a ∩ b| / |a ∪ b|; two empty sets overlap fully.
inline Rational jaccard(const ReasoningCodeSet& a, const ReasoningCodeSet& b) {
    const auto uni = (a | b).size();
    if (uni == 0) return Rational(1);
    return Rational(static_cast<std::int64_t>((a & b).size()), static_cast<std::int64_t>(uni));
}

}  // namespace delphi
