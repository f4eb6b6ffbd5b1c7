#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "delphi/codes.hpp"
#include "delphi/corpus_types.hpp"
#include "delphi/enum_names.hpp"
#include "delphi/rational.hpp"

namespace delphi {

enum class Role { senior_expert, less_experienced, ai_respondent };
enum class ItemKind { fixed, other_slot };
enum class ItemOrigin { a_priori, participant_proposed };
enum class ResponseFormat { likert, binary, prioritisation };
enum class WorkflowState { draft, items_finalized, collecting, clarifying, adjudicating, classified, reported };

template <>
struct EnumNames<Role> {
    static constexpr std::string_view label = "role";
    static constexpr std::array<std::pair<Role, std::string_view>, 3> entries{{
        {Role::senior_expert, "senior_expert"},
        {Role::less_experienced, "less_experienced"},
        {Role::ai_respondent, "ai_respondent"},
    }};
};

template <>
struct EnumNames<ItemKind> {
    static constexpr std::string_view label = "item kind";
    static constexpr std::array<std::pair<ItemKind, std::string_view>, 2> entries{{
        {ItemKind::fixed, "fixed"},
        {ItemKind::other_slot, "other_slot"},
    }};
};

template <>
struct EnumNames<ItemOrigin> {
    static constexpr std::string_view label = "item origin";
    static constexpr std::array<std::pair<ItemOrigin, std::string_view>, 2> entries{{
        {ItemOrigin::a_priori, "a_priori"},
        {ItemOrigin::participant_proposed, "participant_proposed"},
    }};
};

template <>
struct EnumNames<ResponseFormat> {
    static constexpr std::string_view label = "response format";
    static constexpr std::array<std::pair<ResponseFormat, std::string_view>, 3> entries{{
        {ResponseFormat::likert, "likert"},
        {ResponseFormat::binary, "binary"},
        {ResponseFormat::prioritisation, "prioritisation"},
    }};
};

template <>
struct EnumNames<WorkflowState> {
    static constexpr std::string_view label = "workflow state";
    static constexpr std::array<std::pair<WorkflowState, std::string_view>, 7> entries{{
        {WorkflowState::draft, "draft"},
        {WorkflowState::items_finalized, "items_finalized"},
        {WorkflowState::collecting, "collecting"},
        {WorkflowState::clarifying, "clarifying"},
        {WorkflowState::adjudicating, "adjudicating"},
        {WorkflowState::classified, "classified"},
        {WorkflowState::reported, "reported"},
    }};
};

struct ThematicSection {
    std::string id;
    std::string name;
};

struct Item {
    std::string id;
    std::string section_id;
    std::string statement;
    ItemKind kind = ItemKind::fixed;
    ItemOrigin origin = ItemOrigin::a_priori;
    ResponseFormat format = ResponseFormat::likert;
    bool finalized = false;
    std::optional<std::string> proposed_by;  // participant_proposed only
};

struct Panelist {
    std::string id;
    Role role = Role::senior_expert;
    std::string label;
};

struct ClarificationExchange {
    std::string question;
    std::optional<std::string> answer;
    std::string timestamp;  // when asked, ISO-8601 UTC
    std::optional<std::string> answered_at;

    bool open() const { return !answer.has_value(); }
};

struct Response {
    std::string item_id;
    std::string panelist_id;
    int rating = 0;
    std::string justification;
    ReasoningCodeSet codes;
    bool novelty_flag = false;
    std::vector<ClarificationExchange> clarification_thread;

    bool coded() const { return !codes.empty(); }
};

inline std::string response_id(const std::string& item_id, const std::string& panelist_id) {
    return item_id + ":" + panelist_id;
}

inline std::string response_id(const Response& r) { return response_id(r.item_id, r.panelist_id); }

/// Per-study engine knobs; defaults are the engine's documented defaults.
struct StudySettings {
    std::size_t quorum = 4;
    std::vector<Role> consensus_roles{Role::senior_expert};
    Rational alignment_threshold{1, 2};
    std::size_t max_ai_respondents = 1;

    bool counts_for_consensus(Role r) const {
        return std::find(consensus_roles.begin(), consensus_roles.end(), r) != consensus_roles.end();
    }
};

struct Study {
    std::string id;
    std::string title;
    std::vector<ThematicSection> sections;
    std::vector<Item> items;
    std::vector<Panelist> panel;
    WorkflowState round_state = WorkflowState::draft;
    std::optional<CorpusSpec> corpus;
    std::vector<Response> responses;
    StudySettings settings;

    const Item* find_item(const std::string& item_id) const {
        auto it = std::find_if(items.begin(), items.end(), [&](const Item& i) { return i.id == item_id; });
        return it == items.end() ? nullptr : &*it;
    }
    Item* find_item(const std::string& item_id) {
        return const_cast<Item*>(std::as_const(*this).find_item(item_id));
    }
    const Panelist* find_panelist(const std::string& panelist_id) const {
        auto it = std::find_if(panel.begin(), panel.end(), [&](const Panelist& p) { return p.id == panelist_id; });
        return it == panel.end() ? nullptr : &*it;
    }
    const ThematicSection* find_section(const std::string& section_id) const {
        auto it = std::find_if(sections.begin(), sections.end(),
                               [&](const ThematicSection& s) { return s.id == section_id; });
        return it == sections.end() ? nullptr : &*it;
    }
    const Response* find_response(const std::string& item_id, const std::string& panelist_id) const {
        auto it = std::find_if(responses.begin(), responses.end(), [&](const Response& r) {
            return r.item_id == item_id && r.panelist_id == panelist_id;
        });
        return it == responses.end() ? nullptr : &*it;
    }
    Response* find_response(const std::string& item_id, const std::string& panelist_id) {
        return const_cast<Response*>(std::as_const(*this).find_response(item_id, panelist_id));
    }

    std::optional<Role> role_of(const std::string& panelist_id) const {
        if (const auto* p = find_panelist(panelist_id)) return p->role;
        return std::nullopt;
    }

    std::vector<const Panelist*> panelists_with_role(Role role) const {
        std::vector<const Panelist*> out;
        for (const auto& p : panel) {
            if (p.role == role) out.push_back(&p);
        }
        return out;
    }

    /// Responses on one item from panelists whose role passes `keep`.
    template <typename Pred>
    std::vector<Response> responses_for(const std::string& item_id, Pred keep) const {
        std::vector<Response> out;
        for (const auto& r : responses) {
            if (r.item_id != item_id) continue;
            if (auto role = role_of(r.panelist_id); role && keep(*role)) out.push_back(r);
        }
        return out;
    }

    std::vector<Response> consensus_responses(const std::string& item_id) const {
        return responses_for(item_id, [&](Role r) { return settings.counts_for_consensus(r); });
    }
};

}  // namespace delphi
