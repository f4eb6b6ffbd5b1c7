#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "delphi/csv.hpp"
#include "delphi/error.hpp"
#include "delphi/model.hpp"
#include "delphi/rational.hpp"

namespace delphi {

/// Declared in rating order so the enum compares like the scale.
enum class Band { negative, neutral, positive };
enum class StanceBand { negative, neutral, positive, mixed };
enum class AlignmentCategory { fully_aligned, partially_aligned, divergent };

template <>
struct EnumNames<Band> {
    static constexpr std::string_view label = "band";
    static constexpr std::array<std::pair<Band, std::string_view>, 3> entries{{
        {Band::negative, "negative"},
        {Band::neutral, "neutral"},
        {Band::positive, "positive"},
    }};
};

template <>
struct EnumNames<StanceBand> {
    static constexpr std::string_view label = "stance band";
    static constexpr std::array<std::pair<StanceBand, std::string_view>, 4> entries{{
        {StanceBand::negative, "negative"},
        {StanceBand::neutral, "neutral"},
        {StanceBand::positive, "positive"},
        {StanceBand::mixed, "mixed"},
    }};
};

template <>
struct EnumNames<AlignmentCategory> {
    static constexpr std::string_view label = "alignment category";
    static constexpr std::array<std::pair<AlignmentCategory, std::string_view>, 3> entries{{
        {AlignmentCategory::fully_aligned, "fully_aligned"},
        {AlignmentCategory::partially_aligned, "partially_aligned"},
        {AlignmentCategory::divergent, "divergent"},
    }};
};

inline Band band(int rating) {
    if (rating < 1 || rating > 5) throw Error("invalid rating", std::to_string(rating));
    if (rating >= 4) return Band::positive;
    if (rating == 3) return Band::neutral;
    return Band::negative;
}

struct PanelStance {
    StanceBand band = StanceBand::mixed;
    Rational majority_fraction{0};
    ReasoningCodeSet code_union;

    bool operator==(const PanelStance&) const = default;
};

/// Plurality band of the human responses, or mixed when no band is a
/// strict plurality.
inline PanelStance panel_stance(std::span<const Response> responses) {
    if (responses.empty()) throw Error("no responses");
    std::array<std::int64_t, 3> counts{};
    PanelStance s;
    for (const auto& r : responses) {
        ++counts[static_cast<std::size_t>(band(r.rating))];
        s.code_union |= r.codes;
    }
    const auto top = *std::max_element(counts.begin(), counts.end());
    const auto holders = std::count(counts.begin(), counts.end(), top);
    s.majority_fraction = Rational(top, static_cast<std::int64_t>(responses.size()));
    if (holders > 1) {
        s.band = StanceBand::mixed;
    } else {
        const auto idx = static_cast<std::size_t>(std::find(counts.begin(), counts.end(), top) - counts.begin());
        s.band = static_cast<StanceBand>(idx);
    }
    return s;
}

/// Same band as the panel; against a mixed panel only neutral concurs.
inline bool band_concordant(Band b, StanceBand panel) {
    if (panel == StanceBand::mixed) return b == Band::neutral;
    return static_cast<int>(b) == static_cast<int>(panel);
}

struct AlignmentOverride {
    std::string item_id;
    AlignmentCategory category = AlignmentCategory::fully_aligned;
    AlignmentCategory prior = AlignmentCategory::fully_aligned;  // automatic category replaced
    std::string rationale;
    std::string author;
    std::string timestamp;

    bool operator==(const AlignmentOverride&) const = default;
};

struct AlignmentRecord {
    std::string item_id;
    AlignmentCategory category = AlignmentCategory::divergent;
    AlignmentCategory automatic = AlignmentCategory::divergent;
    Band ai_band = Band::neutral;
    PanelStance panel;
    Rational overlap{0};
    std::optional<AlignmentOverride> facilitator_override;
};

/// Rules, in order: band discordance -> divergent; otherwise code overlap
/// at or above threshold -> fully aligned, below -> partially aligned.
inline AlignmentRecord classify_alignment(const Response& ai, Role ai_role, const PanelStance& panel,
                                          const Rational& threshold = Rational(1, 2)) {
    if (ai_role != Role::ai_respondent) throw Error("not an ai response", response_id(ai));
    if (!ai.coded()) throw Error("incomplete coding", response_id(ai));
    AlignmentRecord rec;
    rec.item_id = ai.item_id;
    rec.ai_band = band(ai.rating);
    rec.panel = panel;
    rec.overlap = jaccard(ai.codes, panel.code_union);
    if (!band_concordant(rec.ai_band, panel.band)) {
        rec.automatic = AlignmentCategory::divergent;
    } else if (rec.overlap >= threshold) {
        rec.automatic = AlignmentCategory::fully_aligned;
    } else {
        rec.automatic = AlignmentCategory::partially_aligned;
    }
    rec.category = rec.automatic;
    return rec;
}

inline AlignmentRecord apply_override(AlignmentRecord rec, AlignmentOverride ov) {
    if (ov.rationale.empty()) throw Error("missing rationale", "alignment override on " + rec.item_id);
    ov.item_id = rec.item_id;
    ov.prior = rec.automatic;
    rec.category = ov.category;
    rec.facilitator_override = std::move(ov);
    return rec;
}

struct AlignmentTally {
    std::vector<AlignmentRecord> records;  // questionnaire order
    std::array<std::size_t, 3> counts{};
    std::array<std::size_t, 3> automatic_counts{};

    std::size_t total() const { return records.size(); }
    std::size_t count(AlignmentCategory c) const { return counts[static_cast<std::size_t>(c)]; }
    std::size_t automatic(AlignmentCategory c) const { return automatic_counts[static_cast<std::size_t>(c)]; }
    std::size_t concordant() const {
        return count(AlignmentCategory::fully_aligned) + count(AlignmentCategory::partially_aligned);
    }
    Rational concordance() const {
        if (records.empty()) return Rational(0);
        return Rational(static_cast<std::int64_t>(concordant()), static_cast<std::int64_t>(total()));
    }
};

using AlignmentOverrideMap = std::map<std::string, AlignmentOverride>;

/// Alignment for every item rated by the AI respondent and by at least one
/// consensus-role panelist.
inline AlignmentTally alignment_summary(const Study& study, const AlignmentOverrideMap& overrides = {}) {
    AlignmentTally tally;
    const auto ai_panel = study.panelists_with_role(Role::ai_respondent);
    if (ai_panel.empty()) return tally;
    for (const auto& item : study.items) {
        const auto humans = study.consensus_responses(item.id);
        if (humans.empty()) continue;
        for (const auto* ai : ai_panel) {
            const Response* r = study.find_response(item.id, ai->id);
            if (!r) continue;
            if (!r->coded()) throw Error("incomplete alignment", item.id);
            auto rec = classify_alignment(*r, Role::ai_respondent, panel_stance(humans),
                                          study.settings.alignment_threshold);
            if (auto it = overrides.find(item.id); it != overrides.end()) rec = apply_override(rec, it->second);
            ++tally.counts[static_cast<std::size_t>(rec.category)];
            ++tally.automatic_counts[static_cast<std::size_t>(rec.automatic)];
            tally.records.push_back(std::move(rec));
        }
    }
    return tally;
}

/// `item_id,ai_band,panel_band,overlap,category`
inline std::string alignment_csv(const AlignmentTally& tally) {
    std::ostringstream out;
    out << "item_id,ai_band,panel_band,overlap,category\n";
    for (const auto& r : tally.records) {
        out << csv::escape(r.item_id) << ',' << enum_name(r.ai_band) << ',' << enum_name(r.panel.band) << ','
            << to_string(r.overlap) << ',' << enum_name(r.category) << '\n';
    }
    return out.str();
}

}  // namespace delphi
