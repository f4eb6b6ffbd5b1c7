#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "delphi/csv.hpp"
#include "delphi/error.hpp"
#include "delphi/model.hpp"
#include "delphi/rational.hpp"

namespace delphi {

enum class Direction { positive, negative, tied };
enum class Basis { shared, conditionally_reconciled, minor_reservations, irreconcilable };
enum class Tier { strong, conditional, operational, divergent };

template <>
struct EnumNames<Direction> {
    static constexpr std::string_view label = "direction";
    static constexpr std::array<std::pair<Direction, std::string_view>, 3> entries{{
        {Direction::positive, "positive"},
        {Direction::negative, "negative"},
        {Direction::tied, "tied"},
    }};
};

template <>
struct EnumNames<Basis> {
    static constexpr std::string_view label = "basis";
    static constexpr std::array<std::pair<Basis, std::string_view>, 4> entries{{
        {Basis::shared, "shared"},
        {Basis::conditionally_reconciled, "conditionally_reconciled"},
        {Basis::minor_reservations, "minor_reservations"},
        {Basis::irreconcilable, "irreconcilable"},
    }};
};

template <>
struct EnumNames<Tier> {
    static constexpr std::string_view label = "tier";
    static constexpr std::array<std::pair<Tier, std::string_view>, 4> entries{{
        {Tier::strong, "strong"},
        {Tier::conditional, "conditional"},
        {Tier::operational, "operational"},
        {Tier::divergent, "divergent"},
    }};
};

inline constexpr std::array<Tier, 4> kAllTiers{Tier::strong, Tier::conditional, Tier::operational, Tier::divergent};

inline std::string_view tier_title(Tier t) {
    switch (t) {
        case Tier::strong: return "Strong Consensus";
        case Tier::conditional: return "Conditional Consensus";
        case Tier::operational: return "Operational Consensus";
        case Tier::divergent: return "No Consensus / Divergent";
    }
    return "";
}

inline bool is_consensus(Tier t) { return t != Tier::divergent; }

struct AgreementSummary {
    std::size_t n_total = 0;
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
    std::size_t n_neutral = 0;
    Direction direction = Direction::tied;
    Rational fraction{0};

    bool operator==(const AgreementSummary&) const = default;
};

struct CompatibilityAnnotation {
    std::string item_id;
    Basis basis = Basis::shared;
    std::string rationale;
    std::string author;
    std::string timestamp;

    bool operator==(const CompatibilityAnnotation&) const = default;
};

inline CompatibilityAnnotation default_annotation(const std::string& item_id) {
    return {item_id, Basis::shared, {}, {}, {}};
}

inline void check_annotation(const CompatibilityAnnotation& a) {
    if (a.basis != Basis::shared && a.rationale.empty()) {
        throw Error("missing rationale", "basis " + std::string(enum_name(a.basis)) + " on " + a.item_id);
    }
}

/// One superseded classification plus the adjudication that replaced it.
struct ClassificationHistoryEntry {
    Tier tier = Tier::divergent;
    CompatibilityAnnotation basis;
    CompatibilityAnnotation adjudication;

    bool operator==(const ClassificationHistoryEntry&) const = default;
};

struct ConsensusClassification {
    std::string item_id;
    Tier tier = Tier::divergent;
    AgreementSummary agreement;
    CompatibilityAnnotation basis;
    std::vector<ClassificationHistoryEntry> history;

    bool operator==(const ConsensusClassification&) const = default;
};

/// Band counts over one item's responses. Neutral ratings sit in the
/// denominator only.
inline AgreementSummary directional_agreement(std::span<const Response> responses) {
    if (responses.empty()) throw Error("no responses");
    AgreementSummary s;
    std::set<std::string> panelists;
    for (const auto& r : responses) {
        if (r.item_id != responses.front().item_id) throw Error("mixed items", r.item_id);
        if (!panelists.insert(r.panelist_id).second) throw Error("duplicate response", response_id(r));
        if (r.rating < 1 || r.rating > 5) throw Error("invalid rating", response_id(r));
        if (r.rating >= 4) {
            ++s.n_positive;
        } else if (r.rating <= 2) {
            ++s.n_negative;
        } else {
            ++s.n_neutral;
        }
    }
    s.n_total = responses.size();
    s.direction = s.n_positive > s.n_negative   ? Direction::positive
                  : s.n_negative > s.n_positive ? Direction::negative
                                                : Direction::tied;
    s.fraction = Rational(static_cast<std::int64_t>(std::max(s.n_positive, s.n_negative)),
                          static_cast<std::int64_t>(s.n_total));
    return s;
}

inline const Rational kStrongThreshold{3, 4};
inline const Rational kOperationalThreshold{2, 3};

/// Tier precedence:
///   1. irreconcilable                      -> divergent
///   2. fraction >= 3/4 and shared          -> strong
///   3. conditionally_reconciled            -> conditional
///   4. 2/3 <= fraction < 3/4, shared/minor -> operational
///   5. anything else                       -> divergent
/// A tied direction never qualifies for rules 2 or 4.
inline Tier apply_precedence(const AgreementSummary& agreement, Basis basis) {
    const bool directed = agreement.direction != Direction::tied;
    if (basis == Basis::irreconcilable) return Tier::divergent;
    if (directed && agreement.fraction >= kStrongThreshold && basis == Basis::shared) return Tier::strong;
    if (basis == Basis::conditionally_reconciled) return Tier::conditional;
    if (directed && agreement.fraction >= kOperationalThreshold && agreement.fraction < kStrongThreshold &&
        (basis == Basis::shared || basis == Basis::minor_reservations)) {
        return Tier::operational;
    }
    return Tier::divergent;
}

inline ConsensusClassification classify_consensus(const Item& item, std::span<const Response> responses,
                                                  const CompatibilityAnnotation& basis, std::size_t quorum = 4) {
    if (responses.size() < quorum) {
        throw Error("insufficient quorum", item.id + " has " + std::to_string(responses.size()) + " of " +
                                               std::to_string(quorum) + " responses");
    }
    for (const auto& r : responses) {
        if (r.item_id != item.id) throw Error("mixed items", r.item_id);
    }
    check_annotation(basis);
    ConsensusClassification c;
    c.item_id = item.id;
    c.agreement = directional_agreement(responses);
    c.basis = basis;
    c.basis.item_id = item.id;
    c.tier = apply_precedence(c.agreement, basis.basis);
    return c;
}

/// Divergent -> conditional after facilitator clarification.
inline ConsensusClassification reclassify(const ConsensusClassification& classification,
                                          const CompatibilityAnnotation& adjudication) {
    if (classification.tier != Tier::divergent) {
        throw Error("illegal reclassification",
                    classification.item_id + " is " + std::string(enum_name(classification.tier)));
    }
    if (adjudication.basis != Basis::conditionally_reconciled) {
        throw Error("unsupported adjudication", std::string(enum_name(adjudication.basis)));
    }
    check_annotation(adjudication);
    ConsensusClassification next = classification;
    next.history.push_back({classification.tier, classification.basis, adjudication});
    next.basis = adjudication;
    next.basis.item_id = classification.item_id;
    next.tier = Tier::conditional;
    return next;
}

/// Tier obtained by re-running the original classification and then every
/// recorded adjudication in order.
inline Tier replay_tier(const ConsensusClassification& c) {
    const Basis original = c.history.empty() ? c.basis.basis : c.history.front().basis.basis;
    Tier tier = apply_precedence(c.agreement, original);
    for (const auto& entry : c.history) {
        if (tier == Tier::divergent && entry.adjudication.basis == Basis::conditionally_reconciled) {
            tier = Tier::conditional;
        }
    }
    return tier;
}

struct TierTally {
    std::array<std::size_t, 4> counts{};  // indexed by Tier
    std::size_t classified = 0;

    std::size_t count(Tier t) const { return counts[static_cast<std::size_t>(t)]; }
    std::size_t consensus() const { return count(Tier::strong) + count(Tier::conditional) + count(Tier::operational); }
    std::string percent(Tier t) const {
        return format_percent(static_cast<std::int64_t>(count(t)), static_cast<std::int64_t>(classified));
    }
    std::string consensus_rate() const {
        return format_percent(static_cast<std::int64_t>(consensus()), static_cast<std::int64_t>(classified));
    }
};

inline TierTally tally(std::span<const ConsensusClassification> classifications) {
    if (classifications.empty()) throw Error("incomplete classification", "no classified items");
    TierTally t;
    for (const auto& c : classifications) {
        ++t.counts[static_cast<std::size_t>(c.tier)];
        ++t.classified;
    }
    return t;
}

using ClassificationMap = std::map<std::string, ConsensusClassification>;

inline bool is_quorate(const Study& study, const Item& item) {
    return study.consensus_responses(item.id).size() >= study.settings.quorum;
}

inline std::vector<const Item*> quorate_items(const Study& study) {
    std::vector<const Item*> out;
    for (const auto& item : study.items) {
        if (is_quorate(study, item)) out.push_back(&item);
    }
    return out;
}

/// Classifications in questionnaire order.
inline std::vector<ConsensusClassification> ordered_classifications(const Study& study,
                                                                    const ClassificationMap& classifications) {
    std::vector<ConsensusClassification> out;
    for (const auto& item : study.items) {
        if (auto it = classifications.find(item.id); it != classifications.end()) out.push_back(it->second);
    }
    return out;
}

inline TierTally summary_stats(const Study& study, const ClassificationMap& classifications) {
    for (const auto* item : quorate_items(study)) {
        if (!classifications.count(item->id)) throw Error("incomplete classification", item->id);
    }
    const auto ordered = ordered_classifications(study, classifications);
    return tally(ordered);
}

/// `item_id,tier,fraction,basis`
inline std::string tiers_csv(std::span<const ConsensusClassification> classifications) {
    std::ostringstream out;
    out << "item_id,tier,fraction,basis\n";
    for (const auto& c : classifications) {
        out << csv::escape(c.item_id) << ',' << enum_name(c.tier) << ',' << to_string(c.agreement.fraction) << ','
            << enum_name(c.basis.basis) << '\n';
    }
    return out.str();
}

}  // namespace delphi
