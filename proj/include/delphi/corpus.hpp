#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "delphi/corpus_types.hpp"
#include "delphi/error.hpp"
#include "delphi/model.hpp"

namespace delphi {

enum class StudyType { panel, systematic_review };

template <>
struct EnumNames<StudyType> {
    static constexpr std::string_view label = "study type";
    static constexpr std::array<std::pair<StudyType, std::string_view>, 2> entries{{
        {StudyType::panel, "panel"},
        {StudyType::systematic_review, "systematic_review"},
    }};
};

struct StudyMeta {
    StudyType type = StudyType::panel;
    std::optional<CalendarDate> convening_date;
    std::optional<CalendarDate> publication_date;
};

inline constexpr int kUnknownConveningOffsetMonths = 9;

/// Panel studies: convening date, else publication minus nine months.
/// Systematic reviews: publication date.
inline CalendarDate resolve_cutoff(const StudyMeta& meta) {
    if (meta.type == StudyType::systematic_review) {
        if (meta.publication_date) return *meta.publication_date;
        if (meta.convening_date) return *meta.convening_date;
        throw Error("cutoff unresolvable");
    }
    if (meta.convening_date) return *meta.convening_date;
    if (meta.publication_date) return meta.publication_date->minus_months(kUnknownConveningOffsetMonths);
    throw Error("cutoff unresolvable");
}

struct AdmissionDecision {
    std::string source_id;
    bool admitted = false;
    std::string reason;  // empty when admitted
    std::optional<int> trust_level;

    bool operator==(const AdmissionDecision&) const = default;
};

inline void check_source_record(const SourceRecord& s) {
    try {
        (void)CalendarDate::parse(s.publication_date);
    } catch (const Error&) {
        throw Error("invalid source record", s.id + ": publication date '" + s.publication_date + "'");
    }
    if (s.trust_level < 1 || s.trust_level > 4) {
        throw Error("invalid source record", s.id + ": trust level " + std::to_string(s.trust_level));
    }
    if (s.category == SourceCategory::vetted_website && (!s.vetting_note || s.vetting_note->empty())) {
        throw Error("invalid source record", s.id + ": vetted website without vetting note");
    }
}

/// Pure per-source decision; admission of one source never depends on
/// another.
inline AdmissionDecision admit_source(const CorpusSpec& spec, const SourceRecord& source) {
    check_source_record(source);
    const auto date = CalendarDate::parse(source.publication_date);
    auto reject = [&](std::string why) { return AdmissionDecision{source.id, false, std::move(why), std::nullopt}; };

    if (date.compare(spec.cutoff_date) > 0) return reject("post-cutoff");
    if (source.access == Access::restricted || source.category == SourceCategory::paywalled_article) {
        return reject("excluded access class");
    }
    if (spec.exclusions.count(source.category)) return reject("excluded category");
    if (!spec.categories.count(source.category)) return reject("category not admitted");
    if (requires_vetting(source.category) && !spec.vetted(source.id)) return reject("unvetted grey literature");
    return {source.id, true, {}, source.trust_level};
}

inline std::vector<AdmissionDecision> admit_all(const CorpusSpec& spec) {
    std::vector<AdmissionDecision> out;
    out.reserve(spec.sources.size());
    for (const auto& s : spec.sources) out.push_back(admit_source(spec, s));
    return out;
}

/// Admitted sources ordered by trust level, then id.
inline std::vector<SourceRecord> admitted_sources(const CorpusSpec& spec) {
    std::vector<SourceRecord> out;
    for (const auto& s : spec.sources) {
        if (admit_source(spec, s).admitted) out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const SourceRecord& a, const SourceRecord& b) {
        return a.trust_level != b.trust_level ? a.trust_level < b.trust_level : a.id < b.id;
    });
    return out;
}

/// CorpusSpec with trust_levels rebuilt from the admission decisions.
inline CorpusSpec with_trust_levels(CorpusSpec spec) {
    spec.trust_levels.clear();
    for (const auto& d : admit_all(spec)) {
        if (d.admitted) spec.trust_levels[d.source_id] = *d.trust_level;
    }
    return spec;
}

inline constexpr std::string_view kProtocolName = "delphi-respondent";
inline constexpr std::string_view kProtocolVersion = "1";

inline std::string protocol_tag() {
    return std::string(kProtocolName) + "/" + std::string(kProtocolVersion);
}

struct PromptDocument {
    std::string item_id;
    ResponseFormat format = ResponseFormat::likert;
    std::string cutoff;
    std::vector<std::string> admitted_source_ids;
    std::string text;
};

inline std::string answer_contract_line(ResponseFormat format) {
    switch (format) {
        case ResponseFormat::likert:
            return "rating: <integer 1-5; 1 = strongly disagree, 3 = neutral, 5 = strongly agree>";
        case ResponseFormat::binary:
            return "decision: <yes|no>";
        case ResponseFormat::prioritisation:
            return "priority: <integer 1-5; 1 = highest priority, 5 = lowest>";
    }
    return {};
}

/// Deterministic prompt text. Only admitted sources are listed.
inline PromptDocument build_prompt(const Item& item, const CorpusSpec& spec, ResponseFormat format) {
    if (!item.finalized) throw Error("item not finalized", item.id);
    PromptDocument doc;
    doc.item_id = item.id;
    doc.format = format;
    doc.cutoff = spec.cutoff_date.to_string();
    const auto admitted = admitted_sources(spec);

    std::ostringstream out;
    out << "protocol: " << protocol_tag() << '\n';
    out << "item_id: " << item.id << '\n';
    out << "format: " << enum_name(format) << '\n';
    out << "statement: " << item.statement << "\n\n";
    out << "Constraints:\n";
    out << "- Use only the admitted sources listed below; cite them by id.\n";
    out << "- Ignore anything published after " << doc.cutoff << ".\n";
    out << "- Excluded source classes:";
    bool first = true;
    for (auto c : spec.exclusions) {
        out << (first ? " " : ", ") << enum_name(c);
        first = false;
    }
    out << "; restricted-access material is excluded.\n";
    out << "- Prefer higher trust levels (1 highest) and state evidence strength.\n\n";
    out << "Admitted sources:\n";
    for (const auto& s : admitted) {
        doc.admitted_source_ids.push_back(s.id);
        out << "- " << s.id << " [level " << s.trust_level << ", " << enum_name(s.category) << ", "
            << s.publication_date << "] " << s.title << '\n';
    }
    out << "\nAnswer with exactly these lines:\n";
    out << "protocol: " << protocol_tag() << '\n';
    out << answer_contract_line(format) << '\n';
    out << "justification: <non-empty written justification>\n";
    out << "sources: <comma-separated admitted source ids>\n";
    doc.text = out.str();
    return doc;
}

}  // namespace delphi
