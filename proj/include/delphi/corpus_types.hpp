#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delphi/enum_names.hpp"
#include "delphi/error.hpp"

namespace delphi {

/// Calendar date at month or day precision ("2024-03" or "2024-03-15").
struct CalendarDate {
    int year = 0;
    unsigned month = 1;
    std::optional<unsigned> day;

    static CalendarDate parse(const std::string& text) {
        int y = 0;
        unsigned m = 0, d = 0;
        char tail = 0;
        CalendarDate out;
        if (text.size() == 10 && std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) == 3) {
            out = {y, m, d};
        } else if (text.size() == 7 && std::sscanf(text.c_str(), "%4d-%2u%c", &y, &m, &tail) == 2) {
            out = {y, m, std::nullopt};
        } else {
            throw Error("invalid date", text);
        }
        if (!out.valid()) throw Error("invalid date", text);
        return out;
    }

    bool valid() const {
        using namespace std::chrono;
        if (month < 1 || month > 12 || year < 1) return false;
        if (!day) return true;
        return year_month_day{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{*day}}.ok();
    }

    std::string to_string() const {
        char buf[16];
        if (day) {
            std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, *day);
        } else {
            std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
        }
        return buf;
    }

    /// Same precision, shifted back by whole months; day clamps to month end.
    CalendarDate minus_months(int n) const {
        using namespace std::chrono;
        const auto ym = year_month{std::chrono::year{year}, std::chrono::month{month}} - months{n};
        CalendarDate out{static_cast<int>(ym.year()), static_cast<unsigned>(ym.month()), std::nullopt};
        if (day) {
            const auto last = static_cast<unsigned>(year_month_day_last{ym.year(), month_day_last{ym.month()}}.day());
            out.day = std::min(*day, last);
        }
        return out;
    }

    /// Ordering at the coarser of the two precisions: 2022-10-15 is
    /// equivalent to 2022-10.
    std::strong_ordering compare(const CalendarDate& o) const {
        if (auto c = year <=> o.year; c != 0) return c;
        if (auto c = month <=> o.month; c != 0) return c;
        if (day && o.day) return *day <=> *o.day;
        return std::strong_ordering::equal;
    }

    bool operator==(const CalendarDate&) const = default;
};

enum class SourceCategory {
    open_access_literature,
    public_guideline,
    agency_report,
    vetted_website,
    grey_literature,
    paywalled_article,
    commercial_textbook,
    social_media,
    forum,
    personal_blog,
};

template <>
struct EnumNames<SourceCategory> {
    static constexpr std::string_view label = "source category";
    static constexpr std::array<std::pair<SourceCategory, std::string_view>, 10> entries{{
        {SourceCategory::open_access_literature, "open_access_literature"},
        {SourceCategory::public_guideline, "public_guideline"},
        {SourceCategory::agency_report, "agency_report"},
        {SourceCategory::vetted_website, "vetted_website"},
        {SourceCategory::grey_literature, "grey_literature"},
        {SourceCategory::paywalled_article, "paywalled_article"},
        {SourceCategory::commercial_textbook, "commercial_textbook"},
        {SourceCategory::social_media, "social_media"},
        {SourceCategory::forum, "forum"},
        {SourceCategory::personal_blog, "personal_blog"},
    }};
};

/// Categories that need a facilitator vetting record before admission.
inline bool requires_vetting(SourceCategory c) {
    return c == SourceCategory::vetted_website || c == SourceCategory::grey_literature;
}

enum class Access { public_access, restricted };

template <>
struct EnumNames<Access> {
    static constexpr std::string_view label = "access";
    static constexpr std::array<std::pair<Access, std::string_view>, 2> entries{{
        {Access::public_access, "public"},
        {Access::restricted, "restricted"},
    }};
};

struct SourceRecord {
    std::string id;
    std::string title;
    SourceCategory category = SourceCategory::open_access_literature;
    std::string publication_date;  // kept as text; parsed on admission
    Access access = Access::public_access;
    int trust_level = 1;
    std::optional<std::string> vetting_note;
};

struct VettingRecord {
    std::string source_id;
    std::string approved_by;
    std::string note;
};

struct CorpusSpec {
    CalendarDate cutoff_date;
    std::set<SourceCategory> categories{
        SourceCategory::open_access_literature, SourceCategory::public_guideline,
        SourceCategory::agency_report,          SourceCategory::vetted_website,
        SourceCategory::grey_literature,
    };
    std::set<SourceCategory> exclusions{
        SourceCategory::paywalled_article, SourceCategory::commercial_textbook,
        SourceCategory::social_media,      SourceCategory::forum,
        SourceCategory::personal_blog,
    };
    std::vector<VettingRecord> vetting;
    std::vector<SourceRecord> sources;
    /// Filled from admission decisions: source id -> trust level 1..4.
    std::map<std::string, int> trust_levels;

    bool vetted(const std::string& source_id) const {
        for (const auto& v : vetting) {
            if (v.source_id == source_id) return true;
        }
        return false;
    }
};

}  // namespace delphi
