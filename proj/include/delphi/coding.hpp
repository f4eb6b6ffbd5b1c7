#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "delphi/codes.hpp"
#include "delphi/csv.hpp"
#include "delphi/error.hpp"
#include "delphi/model.hpp"

namespace delphi {

struct CodingRecord {
    std::string response_id;
    ReasoningCodeSet codes;
    std::string coder;
    std::string timestamp;
    std::optional<std::string> note;

    bool operator==(const CodingRecord&) const = default;
};

/// Append-only; the latest record per response is the one in force.
using CodingLog = std::vector<CodingRecord>;

inline Response* find_response_by_id(Study& study, const std::string& rid) {
    for (auto& r : study.responses) {
        if (r.item_id.size() + 1 + r.panelist_id.size() == rid.size() && response_id(r) == rid) return &r;
    }
    return nullptr;
}

inline const Response* find_response_by_id(const Study& study, const std::string& rid) {
    return find_response_by_id(const_cast<Study&>(study), rid);
}

inline CodingRecord record_codes(Study& study, CodingLog& log, const std::string& rid, const ReasoningCodeSet& codes,
                                 const std::string& coder, const std::string& timestamp,
                                 std::optional<std::string> note = std::nullopt) {
    if (codes.empty()) throw Error("empty coding", rid);
    Response* response = find_response_by_id(study, rid);
    if (!response) throw Error("unknown response", rid);
    CodingRecord record{rid, codes, coder, timestamp, std::move(note)};
    log.push_back(record);
    response->codes = codes;
    return record;
}

/// Latest record per response id, in first-coded order.
inline std::vector<CodingRecord> latest_records(const CodingLog& log) {
    std::vector<CodingRecord> out;
    for (const auto& rec : log) {
        auto it = std::find_if(out.begin(), out.end(), [&](const CodingRecord& r) { return r.response_id == rec.response_id; });
        if (it == out.end()) {
            out.push_back(rec);
        } else {
            *it = rec;
        }
    }
    return out;
}

struct ProfileSubject {
    std::optional<Role> role;
    std::optional<std::string> panelist;

    static ProfileSubject of_role(Role r) { return {r, std::nullopt}; }
    static ProfileSubject of_panelist(std::string id) { return {std::nullopt, std::move(id)}; }

    bool matches(const Study& study, const Response& r) const {
        if (panelist) return r.panelist_id == *panelist;
        return study.role_of(r.panelist_id) == role;
    }

    std::string label() const {
        if (panelist) return "panelist " + *panelist;
        return std::string(enum_name(*role));
    }
};

struct ReasoningProfile {
    std::string subject;
    std::array<bool, kCategoryCount> presence{};
    std::array<std::size_t, kCategoryCount> frequency{};
    std::vector<std::string> section_ids;
    /// Row per category, column per section (study order).
    std::array<std::vector<std::size_t>, kCategoryCount> by_section;
    std::size_t responses = 0;

    bool present(Category c) const { return presence[static_cast<std::size_t>(c)]; }
    std::size_t freq(Category c) const { return frequency[static_cast<std::size_t>(c)]; }
};

inline ReasoningProfile reasoning_profile(const Study& study, const ProfileSubject& subject) {
    ReasoningProfile p;
    p.subject = subject.label();
    for (const auto& s : study.sections) p.section_ids.push_back(s.id);
    for (auto& row : p.by_section) row.assign(p.section_ids.size(), 0);

    for (const auto& r : study.responses) {
        if (!subject.matches(study, r)) continue;
        if (!r.coded()) throw Error("incomplete coding", response_id(r));
        ++p.responses;
        const Item* item = study.find_item(r.item_id);
        std::optional<std::size_t> column;
        if (item) {
            auto it = std::find(p.section_ids.begin(), p.section_ids.end(), item->section_id);
            if (it != p.section_ids.end()) column = static_cast<std::size_t>(it - p.section_ids.begin());
        }
        for (auto c : r.codes.categories()) {
            const auto row = static_cast<std::size_t>(c);
            ++p.frequency[row];
            if (column) ++p.by_section[row][*column];
        }
    }
    for (std::size_t i = 0; i < kCategoryCount; ++i) p.presence[i] = p.frequency[i] > 0;
    return p;
}

/// `response_id,categories,coder,timestamp`; categories separated by ';'.
inline std::string coding_csv(const CodingLog& log) {
    std::ostringstream out;
    out << "response_id,categories,coder,timestamp\n";
    for (const auto& rec : log) {
        out << csv::escape(rec.response_id) << ',' << rec.codes.join(';') << ',' << csv::escape(rec.coder) << ','
            << csv::escape(rec.timestamp) << '\n';
    }
    return out.str();
}

inline std::vector<CodingRecord> parse_coding_csv(std::string_view text) {
    auto rows = csv::parse(text);
    std::vector<CodingRecord> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (i == 0 && !row.empty() && row[0] == "response_id") continue;
        if (row.size() != 4) {
            throw Error("malformed document", "coding row " + std::to_string(i + 1) + " has " +
                                                  std::to_string(row.size()) + " fields");
        }
        out.push_back({row[0], ReasoningCodeSet::split(row[1], ';'), row[2], row[3], std::nullopt});
    }
    return out;
}

}  // namespace delphi
