#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "delphi/enum_names.hpp"
#include "delphi/error.hpp"
#include "delphi/model.hpp"

namespace delphi {

enum class WorkflowEvent {
    finalize_items,
    open_collection,
    close_collection,
    begin_adjudication,
    reopen_clarification,
    complete_classification,
    emit_report,
};

template <>
struct EnumNames<WorkflowEvent> {
    static constexpr std::string_view label = "workflow event";
    static constexpr std::array<std::pair<WorkflowEvent, std::string_view>, 7> entries{{
        {WorkflowEvent::finalize_items, "finalize_items"},
        {WorkflowEvent::open_collection, "open_collection"},
        {WorkflowEvent::close_collection, "close_collection"},
        {WorkflowEvent::begin_adjudication, "begin_adjudication"},
        {WorkflowEvent::reopen_clarification, "reopen_clarification"},
        {WorkflowEvent::complete_classification, "complete_classification"},
        {WorkflowEvent::emit_report, "emit_report"},
    }};
};

/// Single-round state machine. Returns nullopt for illegal moves.
inline std::optional<WorkflowState> next_state(WorkflowState from, WorkflowEvent event) {
    using S = WorkflowState;
    using E = WorkflowEvent;
    switch (event) {
        case E::finalize_items:
            if (from == S::draft) return S::items_finalized;
            break;
        case E::open_collection:
            if (from == S::items_finalized) return S::collecting;
            break;
        case E::close_collection:
            if (from == S::collecting) return S::clarifying;
            break;
        case E::begin_adjudication:
            if (from == S::clarifying) return S::adjudicating;
            break;
        case E::reopen_clarification:
            if (from == S::adjudicating) return S::clarifying;
            break;
        case E::complete_classification:
            if (from == S::adjudicating) return S::classified;
            break;
        case E::emit_report:
            if (from == S::classified || from == S::reported) return S::reported;
            break;
    }
    return std::nullopt;
}

inline WorkflowState transition_target(WorkflowState from, WorkflowEvent event) {
    if (auto to = next_state(from, event)) return *to;
    throw Error("invalid transition", std::string(enum_name(event)) + " is not allowed in state " +
                                          std::string(enum_name(from)));
}

/// Throws "invalid transition" naming the current state unless it is one of `allowed`.
inline void require_state(WorkflowState current, std::initializer_list<WorkflowState> allowed,
                          std::string_view operation) {
    for (auto s : allowed) {
        if (s == current) return;
    }
    throw Error("invalid transition", std::string(operation) + " is not allowed in state " +
                                          std::string(enum_name(current)));
}

}  // namespace delphi
