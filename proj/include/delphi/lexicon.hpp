#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delphi/codes.hpp"
#include "delphi/error.hpp"
#include "delphi/rational.hpp"

namespace delphi {

/// Shipped lexicon; data/lexicon.tsv carries the same table.
inline constexpr std::string_view kDefaultLexicon = R"LEX(# lexicon-version: 1
# term<TAB>category; terms match whole words, case-insensitive
depends on	conditional_general
depending on	conditional_general
it depends	conditional_general
when appropriate	conditional_general
in some cases	conditional_general
context	conditional_general
unless	conditional_general
where possible	conditional_general
training age	conditional_population
individual	conditional_population
novice	conditional_population
novices	conditional_population
beginners	conditional_population
older adults	conditional_population
population	conditional_population
patients with	conditional_population
advanced athletes	conditional_population
phase	conditional_temporal
phased	conditional_temporal
over time	conditional_temporal
stage	conditional_temporal
initially	conditional_temporal
taper	conditional_temporal
long-term	conditional_temporal
progression	conditional_temporal
evidence	evidence_based
trials	evidence_based
randomized	evidence_based
randomised	evidence_based
meta-analysis	evidence_based
studies	evidence_based
research	evidence_based
guidelines	evidence_based
systematic review	evidence_based
literature	evidence_based
in my experience	experiential
i have seen	experiential
observed	experiential
in practice	experiential
clients	experiential
athletes i coach	experiential
anecdotally	experiential
feasible	pragmatic
practical	pragmatic
time constraints	pragmatic
cost	pragmatic
adherence	pragmatic
logistics	pragmatic
resources	pragmatic
realistic	pragmatic
principle	principle_based
physiology	principle_based
physiological	principle_based
overload	principle_based
specificity	principle_based
theory	principle_based
mechanism	principle_based
)LEX";

struct LexiconEntry {
    std::string term;  // lower-case, single-space separated words
    Category category;
};

class Lexicon {
public:
    /// Parses `term<TAB>category` lines. '#' lines are comments; a
    /// `# lexicon-version: N` comment sets the version.
    static Lexicon parse(std::string_view text) {
        Lexicon lex;
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start < text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string line(text.substr(start, end - start));
            start = end + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line[0] == '#') {
                constexpr std::string_view tag = "# lexicon-version:";
                if (line.rfind(tag, 0) == 0) {
                    auto v = line.substr(tag.size());
                    v.erase(0, v.find_first_not_of(' '));
                    lex.version_ = v;
                }
                continue;
            }
            const auto tab = line.find('\t');
            if (tab == std::string::npos) throw Error("malformed lexicon", "line " + std::to_string(line_no));
            lex.entries_.push_back({normalize(line.substr(0, tab)), parse_category(line.substr(tab + 1))});
        }
        return lex;
    }

    static const Lexicon& builtin() {
        static const Lexicon lex = parse(kDefaultLexicon);
        return lex;
    }

    const std::string& version() const { return version_; }
    const std::vector<LexiconEntry>& entries() const { return entries_; }

    /// Lower-case words joined by single spaces; punctuation other than
    /// '-' and '\'' separates words.
    static std::string normalize(std::string_view text) {
        std::string out;
        bool pending_space = false;
        for (unsigned char ch : text) {
            if (std::isalnum(ch) || ch == '-' || ch == '\'') {
                if (pending_space && !out.empty()) out += ' ';
                pending_space = false;
                out += static_cast<char>(std::tolower(ch));
            } else {
                pending_space = true;
            }
        }
        return out;
    }

private:
    std::string version_ = "0";
    std::vector<LexiconEntry> entries_;
};

struct CodeSuggestion {
    Category category;
    Rational score;

    bool operator==(const CodeSuggestion&) const = default;
};

/// Lexicon hits per category over all distinct matched terms, highest
/// first, ties in canonical category order. Advisory only: nothing here
/// writes codes.
inline std::vector<CodeSuggestion> suggest_codes(std::string_view justification,
                                                 const Lexicon& lexicon = Lexicon::builtin()) {
    const std::string text = " " + Lexicon::normalize(justification) + " ";
    if (text.size() <= 2) throw Error("empty justification");

    std::array<std::int64_t, kCategoryCount> hits{};
    std::set<std::string> matched;
    for (const auto& e : lexicon.entries()) {
        if (e.term.empty() || matched.count(e.term)) continue;
        if (text.find(" " + e.term + " ") == std::string::npos) continue;
        matched.insert(e.term);
        ++hits[static_cast<std::size_t>(e.category)];
    }
    const auto total = static_cast<std::int64_t>(matched.size());
    std::vector<CodeSuggestion> out;
    if (total == 0) return out;
    for (auto c : kAllCategories) {
        if (auto h = hits[static_cast<std::size_t>(c)]; h > 0) out.push_back({c, Rational(h, total)});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    return out;
}

}  // namespace delphi
