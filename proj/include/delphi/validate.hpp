#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "delphi/model.hpp"

namespace delphi {

struct Violation {
    std::string code;     // e.g. "orphan section"
    std::string subject;  // offending entity id
    std::string detail;
    std::optional<std::size_t> row;  // source row, for ingestion rejects

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::size_t count(const std::string& code) const {
        std::size_t n = 0;
        for (const auto& v : violations) n += v.code == code ? 1 : 0;
        return n;
    }

    /// Adds unless the same (code, subject) was already reported.
    void add(std::string code, std::string subject, std::string detail = {},
             std::optional<std::size_t> row = std::nullopt) {
        for (const auto& v : violations) {
            if (v.code == code && v.subject == subject) return;
        }
        violations.push_back({std::move(code), std::move(subject), std::move(detail), row});
    }
};

/// Structural check of a study. Violations are data; this never throws.
inline ValidationReport validate_study(const Study& study) {
    ValidationReport report;

    std::set<std::string> section_ids;
    for (const auto& s : study.sections) {
        if (!section_ids.insert(s.id).second) report.add("duplicate section id", s.id);
        if (s.name.empty()) report.add("empty section name", s.id);
    }

    std::set<std::string> item_ids;
    for (const auto& item : study.items) {
        if (!item_ids.insert(item.id).second) report.add("duplicate item id", item.id);
        if (!section_ids.count(item.section_id)) {
            report.add("orphan section", item.id, "section '" + item.section_id + "' does not exist");
        }
        if (item.statement.empty()) report.add("empty statement", item.id);
        if (item.origin == ItemOrigin::participant_proposed && item.kind == ItemKind::fixed) {
            report.add("proposal on fixed item", item.id);
        }
    }

    std::set<std::string> panelist_ids;
    std::size_t ai_count = 0;
    for (const auto& p : study.panel) {
        if (!panelist_ids.insert(p.id).second) report.add("duplicate panelist id", p.id);
        if (p.role == Role::ai_respondent && ++ai_count > study.settings.max_ai_respondents) {
            report.add("too many ai respondents", p.id);
        }
    }

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : study.responses) {
        const auto rid = response_id(r);
        if (!item_ids.count(r.item_id)) report.add("unknown item", rid);
        if (!panelist_ids.count(r.panelist_id)) report.add("unknown panelist", rid);
        if (r.rating < 1 || r.rating > 5) {
            report.add("rating out of range", rid, "rating " + std::to_string(r.rating));
        }
        if (r.justification.empty()) report.add("missing justification", rid);
        if (!seen.emplace(r.item_id, r.panelist_id).second) report.add("duplicate response", rid);
        for (const auto& ex : r.clarification_thread) {
            if (ex.question.empty()) report.add("empty question", rid);
        }
    }
    return report;
}

}  // namespace delphi
