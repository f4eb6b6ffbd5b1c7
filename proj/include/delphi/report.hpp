#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "delphi/alignment.hpp"
#include "delphi/coding.hpp"
#include "delphi/consensus.hpp"
#include "delphi/saturation.hpp"
#include "delphi/serialize.hpp"
#include "delphi/state.hpp"
#include "delphi/workflow.hpp"

namespace delphi {

struct PrincipleEntry {
    std::string item_id;
    std::string section_id;
    std::string statement;
    ItemOrigin origin = ItemOrigin::a_priori;
    Tier tier = Tier::divergent;
    AgreementSummary agreement;
    CompatibilityAnnotation basis;
    /// Basis recorded before a divergent -> conditional reclassification.
    std::optional<CompatibilityAnnotation> original_basis;
};

struct SectionGuidance {
    std::string section_id;
    std::string name;
    std::array<std::vector<PrincipleEntry>, 3> by_tier;  // strong, conditional, operational

    std::size_t size() const { return by_tier[0].size() + by_tier[1].size() + by_tier[2].size(); }
};

struct UnclassifiedEntry {
    std::string item_id;
    std::string statement;
    std::size_t responses = 0;
};

struct RoleProfileRow {
    Role role = Role::senior_expert;
    std::size_t panelists = 0;
    std::size_t responses = 0;
    ReasoningProfile profile;
    /// Responses on items that carry at least one consensus-role rating.
    std::size_t comparable = 0;
    /// Of those, responses whose band is concordant with the consensus-role stance.
    std::size_t aligned = 0;
    std::array<std::size_t, 5> histogram{};
    Rational mean_rating{0};

    std::size_t neutral() const { return histogram[2]; }
    std::string alignment_rate() const {
        return format_percent(static_cast<std::int64_t>(aligned), static_cast<std::int64_t>(comparable));
    }
    std::string neutral_share() const {
        return format_percent(static_cast<std::int64_t>(neutral()), static_cast<std::int64_t>(responses));
    }
};

struct ComparisonReport {
    std::vector<RoleProfileRow> roles;

    const RoleProfileRow* find(Role r) const {
        for (const auto& row : roles) {
            if (row.role == r) return &row;
        }
        return nullptr;
    }
};

struct SaturationSummary {
    std::size_t panel_size = 0;
    std::optional<std::size_t> index;
    std::size_t required = 0;
    bool category_complete = false;
};

struct GuidanceDocument {
    std::string study_id;
    std::string title;
    std::size_t quorum = 0;
    TierTally tally;
    std::vector<SectionGuidance> sections;
    std::vector<PrincipleEntry> no_consensus;
    std::vector<UnclassifiedEntry> unclassified;
    std::optional<ComparisonReport> comparison;
    std::string comparison_note;
    std::optional<AlignmentTally> alignment;
    std::string alignment_note;
    std::optional<SaturationSummary> saturation;
    std::string saturation_note;
};

/// Rounds half-up to `places` decimals.
inline std::string format_decimal(const Rational& value, int places) {
    std::int64_t scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    const bool negative = value < 0;
    const Rational v = negative ? -value : value;
    const std::int64_t scaled = (2 * v.numerator() * scale + v.denominator()) / (2 * v.denominator());
    std::string digits = std::to_string(scaled / scale);
    if (places > 0) {
        std::string frac = std::to_string(scaled % scale);
        digits += "." + std::string(static_cast<std::size_t>(places) - frac.size(), '0') + frac;
    }
    return (negative && scaled != 0 ? "-" : "") + digits;
}

/// Per-role reasoning profiles, directional alignment with the consensus-role
/// stance, and rating dispersion. Roles absent from the panel are omitted.
inline ComparisonReport role_comparison(const Study& study) {
    for (const auto& r : study.responses) {
        if (!r.coded()) throw Error("incomplete coding", response_id(r));
    }
    std::map<std::string, std::optional<StanceBand>> stances;
    for (const auto& item : study.items) {
        const auto humans = study.consensus_responses(item.id);
        stances[item.id] = humans.empty() ? std::nullopt : std::optional(panel_stance(humans).band);
    }

    ComparisonReport report;
    for (const auto& [role, name] : EnumNames<Role>::entries) {
        const auto members = study.panelists_with_role(role);
        if (members.empty()) continue;
        RoleProfileRow row;
        row.role = role;
        row.panelists = members.size();
        std::int64_t sum = 0;
        for (const auto& r : study.responses) {
            if (study.role_of(r.panelist_id) != role) continue;
            ++row.responses;
            ++row.histogram[static_cast<std::size_t>(r.rating - 1)];
            sum += r.rating;
            const auto& stance = stances[r.item_id];
            if (!stance) continue;
            ++row.comparable;
            if (band_concordant(band(r.rating), *stance)) ++row.aligned;
        }
        if (row.responses == 0) continue;
        row.mean_rating = Rational(sum, static_cast<std::int64_t>(row.responses));
        row.profile = reasoning_profile(study, ProfileSubject::of_role(role));
        report.roles.push_back(std::move(row));
    }
    return report;
}

namespace detail {

inline PrincipleEntry principle_entry(const Item& item, const ConsensusClassification& c) {
    PrincipleEntry e{item.id, item.section_id, item.statement, item.origin, c.tier, c.agreement, c.basis, std::nullopt};
    if (!c.history.empty()) e.original_basis = c.history.front().basis;
    return e;
}

inline std::size_t tier_slot(Tier t) { return static_cast<std::size_t>(t); }

}  // namespace detail

/// Structured guidance document for a classified study.
inline GuidanceDocument consensus_report(const StudyState& state) {
    const Study& study = state.study;
    require_state(study.round_state, {WorkflowState::classified, WorkflowState::reported}, "report emission");

    GuidanceDocument doc;
    doc.study_id = study.id;
    doc.title = study.title;
    doc.quorum = study.settings.quorum;
    doc.tally = summary_stats(study, state.classifications);

    for (const auto& section : study.sections) doc.sections.push_back({section.id, section.name, {}});
    for (const auto& item : study.items) {
        auto it = state.classifications.find(item.id);
        if (it == state.classifications.end()) {
            doc.unclassified.push_back({item.id, item.statement, study.consensus_responses(item.id).size()});
            continue;
        }
        auto entry = detail::principle_entry(item, it->second);
        if (entry.tier == Tier::divergent) {
            doc.no_consensus.push_back(std::move(entry));
            continue;
        }
        for (auto& s : doc.sections) {
            if (s.section_id == item.section_id) s.by_tier[detail::tier_slot(entry.tier)].push_back(std::move(entry));
        }
    }

    try {
        doc.comparison = role_comparison(study);
    } catch (const Error& e) {
        doc.comparison_note = std::string("omitted: ") + e.what();
    }

    try {
        auto tally = alignment_summary(study, state.overrides);
        if (tally.total() > 0) {
            doc.alignment = std::move(tally);
        } else {
            doc.alignment_note = "omitted: no AI respondent ratings";
        }
    } catch (const Error& e) {
        doc.alignment_note = std::string("omitted: ") + e.what();
    }

    if (study.panelists_with_role(Role::senior_expert).empty()) {
        doc.saturation_note = "omitted: no senior experts";
    } else {
        try {
            const auto traj = cumulative_coverage(study, Role::senior_expert);
            doc.saturation = SaturationSummary{traj.panel_size(), saturation_index(traj, novelty_panelists(study)),
                                               traj.required.size(), traj.category_complete};
        } catch (const Error& e) {
            doc.saturation_note = std::string("omitted: ") + e.what();
        }
    }
    return doc;
}

namespace detail {

inline json entry_json(const PrincipleEntry& e) {
    json j = {{"item_id", e.item_id},
              {"section_id", e.section_id},
              {"statement", e.statement},
              {"origin", e.origin},
              {"tier", e.tier},
              {"agreement", e.agreement},
              {"percent", format_percent(e.agreement.fraction)},
              {"basis", e.basis.basis},
              {"rationale", e.basis.rationale}};
    if (e.original_basis) {
        j["adjudication"] = {{"original_basis", e.original_basis->basis},
                             {"original_rationale", e.original_basis->rationale},
                             {"author", e.basis.author},
                             {"timestamp", e.basis.timestamp}};
    }
    return j;
}

inline json comparison_json(const ComparisonReport& c) {
    json rows = json::array();
    for (const auto& r : c.roles) {
        rows.push_back({{"role", r.role},
                        {"panelists", r.panelists},
                        {"responses", r.responses},
                        {"comparable", r.comparable},
                        {"aligned", r.aligned},
                        {"directional_alignment", r.alignment_rate()},
                        {"rating_histogram", r.histogram},
                        {"neutral", r.neutral()},
                        {"neutral_share", r.neutral_share()},
                        {"mean_rating", format_decimal(r.mean_rating, 2)},
                        {"profile", profile_json(r.profile)}});
    }
    return rows;
}

inline std::string percent_of(std::size_t n, std::size_t d) {
    return format_percent(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

inline std::string md_cell(std::string s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else if (c == '\n') out += ' ';
        else out += c;
    }
    return out;
}

inline void md_entry(std::ostream& out, const PrincipleEntry& e) {
    out << "- **" << e.item_id << "** " << md_cell(e.statement) << '\n';
    out << "  - agreement " << to_string(e.agreement.fraction) << " (" << format_percent(e.agreement.fraction)
        << ", " << enum_name(e.agreement.direction) << "); basis " << enum_name(e.basis.basis);
    if (!e.basis.rationale.empty()) out << ": " << md_cell(e.basis.rationale);
    out << '\n';
    if (e.original_basis) {
        out << "  - adjudicated from " << enum_name(e.original_basis->basis);
        if (!e.basis.author.empty()) out << " by " << e.basis.author;
        out << '\n';
    }
    if (e.origin == ItemOrigin::participant_proposed) out << "  - participant proposed\n";
}

}  // namespace detail

inline json report_json(const GuidanceDocument& doc) {
    json sections = json::array();
    for (const auto& s : doc.sections) {
        json tiers = json::object();
        for (std::size_t t = 0; t < 3; ++t) {
            json entries = json::array();
            for (const auto& e : s.by_tier[t]) entries.push_back(detail::entry_json(e));
            tiers[std::string(enum_name(kAllTiers[t]))] = entries;
        }
        sections.push_back({{"id", s.section_id}, {"name", s.name}, {"tiers", tiers}});
    }
    json none = json::array();
    for (const auto& e : doc.no_consensus) none.push_back(detail::entry_json(e));
    json unclassified = json::array();
    for (const auto& u : doc.unclassified) {
        unclassified.push_back({{"item_id", u.item_id}, {"statement", u.statement}, {"responses", u.responses}});
    }
    json j = {{"schema_version", kSchemaVersion},
              {"study", {{"id", doc.study_id}, {"title", doc.title}, {"quorum", doc.quorum}}},
              {"tally", tally_json(doc.tally)},
              {"sections", sections},
              {"no_consensus", none},
              {"unclassified", unclassified}};
    j["alignment"] = doc.alignment ? alignment_json(*doc.alignment) : json(nullptr);
    if (!doc.alignment_note.empty()) j["alignment_note"] = doc.alignment_note;
    if (doc.saturation) {
        j["saturation"] = {{"role", "senior_expert"},
                           {"panel_size", doc.saturation->panel_size},
                           {"saturation_index", doc.saturation->index ? json(*doc.saturation->index) : json(nullptr)},
                           {"required", doc.saturation->required},
                           {"category_complete", doc.saturation->category_complete}};
    } else {
        j["saturation"] = nullptr;
        j["saturation_note"] = doc.saturation_note;
    }
    j["role_comparison"] = doc.comparison ? detail::comparison_json(*doc.comparison) : json(nullptr);
    if (!doc.comparison_note.empty()) j["role_comparison_note"] = doc.comparison_note;
    return j;
}

inline std::string report_markdown(const GuidanceDocument& doc) {
    using detail::percent_of;
    std::ostringstream out;
    out << "# " << (doc.title.empty() ? doc.study_id : doc.title) << "\n\n";
    out << "Study `" << doc.study_id << "`. Items are classified once at least " << doc.quorum
        << " consensus-role ratings are on file.\n\n";

    out << "## Summary\n\n| Tier | Items | Share |\n|---|---:|---:|\n";
    for (auto t : kAllTiers) out << "| " << tier_title(t) << " | " << doc.tally.count(t) << " | " << doc.tally.percent(t) << " |\n";
    out << "\nConsensus reached on " << doc.tally.consensus() << " of " << doc.tally.classified << " classified items ("
        << doc.tally.consensus_rate() << ").\n";

    for (const auto& s : doc.sections) {
        out << "\n## " << s.name << "\n";
        if (s.size() == 0) {
            out << "\nNo consensus principles in this section.\n";
            continue;
        }
        for (std::size_t t = 0; t < 3; ++t) {
            if (s.by_tier[t].empty()) continue;
            out << "\n### " << tier_title(kAllTiers[t]) << "\n\n";
            for (const auto& e : s.by_tier[t]) detail::md_entry(out, e);
        }
    }

    out << "\n## No consensus\n\n";
    if (doc.no_consensus.empty()) out << "None.\n";
    for (const auto& e : doc.no_consensus) detail::md_entry(out, e);

    if (!doc.unclassified.empty()) {
        out << "\n## Not classified\n\n";
        for (const auto& u : doc.unclassified) {
            out << "- **" << u.item_id << "** " << detail::md_cell(u.statement) << " (" << u.responses << " of "
                << doc.quorum << " required ratings)\n";
        }
    }

    out << "\n## AI respondent alignment\n\n";
    if (doc.alignment) {
        const auto& a = *doc.alignment;
        out << "| Item | AI band | Panel stance | Overlap | Category |\n|---|---|---|---:|---|\n";
        for (const auto& r : a.records) {
            out << "| " << r.item_id << " | " << enum_name(r.ai_band) << " | " << enum_name(r.panel.band) << " | "
                << to_string(r.overlap) << " | " << enum_name(r.category);
            if (r.facilitator_override) out << " (override, was " << enum_name(r.automatic) << ")";
            out << " |\n";
        }
        out << "\nBand concordance: " << a.concordant() << " of " << a.total() << " ("
            << percent_of(a.concordant(), a.total()) << ").\n";
    } else {
        out << doc.alignment_note << "\n";
    }

    out << "\n## Thematic saturation\n\n";
    if (doc.saturation) {
        const auto& s = *doc.saturation;
        out << "Senior panel of " << s.panel_size << "; " << s.required << " (category, section) pairs covered. ";
        if (s.index) {
            out << "Saturation reached at expert " << *s.index << ".";
        } else {
            out << "Saturation not demonstrated before the final expert.";
        }
        out << " All seven categories present: " << (s.category_complete ? "yes" : "no") << ".\n";
    } else {
        out << doc.saturation_note << "\n";
    }

    out << "\n## Appendix: role comparison\n\n";
    if (doc.comparison) {
        out << "| Role | Panelists | Responses | Directional alignment | Neutral share | Mean rating |\n"
               "|---|---:|---:|---:|---:|---:|\n";
        for (const auto& r : doc.comparison->roles) {
            out << "| " << enum_name(r.role) << " | " << r.panelists << " | " << r.responses << " | "
                << r.alignment_rate() << " | " << r.neutral_share() << " | " << format_decimal(r.mean_rating, 2)
                << " |\n";
        }
        out << "\nReasoning category frequency by role:\n\n| Category |";
        for (const auto& r : doc.comparison->roles) out << ' ' << enum_name(r.role) << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < doc.comparison->roles.size(); ++i) out << "---:|";
        out << '\n';
        for (auto c : kAllCategories) {
            out << "| " << to_string(c) << " |";
            for (const auto& r : doc.comparison->roles) out << ' ' << r.profile.freq(c) << " |";
            out << '\n';
        }
    } else {
        out << doc.comparison_note << "\n";
    }
    return out.str();
}

struct RenderedReport {
    std::string markdown;
    std::string tiers_csv;
    std::string json_text;
};

inline RenderedReport render_report(const StudyState& state) {
    const auto doc = consensus_report(state);
    const auto ordered = ordered_classifications(state.study, state.classifications);
    return {report_markdown(doc), tiers_csv(ordered), report_json(doc).dump(2) + "\n"};
}

inline constexpr std::string_view kReportMarkdownFile = "report.md";
inline constexpr std::string_view kTiersCsvFile = "tiers.csv";
inline constexpr std::string_view kReportJsonFile = "report.json";

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("write failure", path.string());
    out << text;
}

inline void write_report_files(const std::filesystem::path& dir, const RenderedReport& r) {
    write_text_file(dir / kReportMarkdownFile, r.markdown);
    write_text_file(dir / kTiersCsvFile, r.tiers_csv);
    write_text_file(dir / kReportJsonFile, r.json_text);
}

}  // namespace delphi
