#pragma once

#include <cstdint>
#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "delphi/adapter.hpp"
#include "delphi/alignment.hpp"
#include "delphi/coding.hpp"
#include "delphi/consensus.hpp"
#include "delphi/digest.hpp"
#include "delphi/model.hpp"
#include "delphi/serialize.hpp"

namespace delphi {

/// One entry of the append-only audit log. The payload carries the command
/// inputs; outcomes are recomputed when the log is replayed.
struct AuditEvent {
    std::uint64_t seq = 0;
    std::string actor;
    std::string action;
    std::string subject;
    std::string timestamp;
    json payload = json::object();
    std::string payload_digest;
};

inline std::string payload_digest(const json& payload) { return sha256_hex(payload.dump()); }

inline AuditEvent make_event(std::uint64_t seq, std::string actor, std::string action, std::string subject,
                             std::string timestamp, json payload) {
    AuditEvent ev{seq, std::move(actor), std::move(action), std::move(subject), std::move(timestamp),
                  std::move(payload), {}};
    ev.payload_digest = payload_digest(ev.payload);
    return ev;
}

inline void to_json(json& j, const AuditEvent& e) {
    j = {{"seq", e.seq},
         {"actor", e.actor},
         {"action", e.action},
         {"subject", e.subject},
         {"timestamp", e.timestamp},
         {"payload", e.payload},
         {"payload_digest", e.payload_digest}};
}
inline void from_json(const json& j, AuditEvent& e) {
    e.seq = j.at("seq").get<std::uint64_t>();
    e.actor = j.at("actor").get<std::string>();
    e.action = j.at("action").get<std::string>();
    e.subject = j.at("subject").get<std::string>();
    e.timestamp = j.at("timestamp").get<std::string>();
    e.payload = j.at("payload");
    e.payload_digest = j.at("payload_digest").get<std::string>();
}

namespace actions {
inline constexpr std::string_view study_create = "study.create";
inline constexpr std::string_view transition = "workflow.transition";
inline constexpr std::string_view ingest = "responses.ingest";
inline constexpr std::string_view ai_response = "ai.response";
inline constexpr std::string_view coding = "coding.record";
inline constexpr std::string_view novelty = "novelty.flag";
inline constexpr std::string_view clarification_request = "clarification.request";
inline constexpr std::string_view clarification_answer = "clarification.answer";
inline constexpr std::string_view annotation = "annotation.record";
inline constexpr std::string_view classify = "consensus.classify";
inline constexpr std::string_view reclassify = "consensus.reclassify";
inline constexpr std::string_view alignment_override = "alignment.override";
inline constexpr std::string_view report_emit = "report.emit";
}  // namespace actions

/// Everything the audit log determines.
struct StudyState {
    Study study;
    CodingLog coding;
    std::map<std::string, CompatibilityAnnotation> annotations;
    ClassificationMap classifications;
    AlignmentOverrideMap overrides;
    std::vector<ProvenanceLog> provenance;
    std::vector<ProvenanceLog> quarantine;
    std::vector<AuditEvent> audit;
};

inline json snapshot_json(const StudyState& s) {
    json annotations = json::array();
    for (const auto& [id, a] : s.annotations) annotations.push_back(a);
    json overrides = json::array();
    for (const auto& [id, o] : s.overrides) overrides.push_back(o);
    return {{"schema_version", kSchemaVersion},
            {"study", s.study},
            {"coding_log", s.coding},
            {"annotations", annotations},
            {"classifications", ordered_classifications(s.study, s.classifications)},
            {"alignment_overrides", overrides},
            {"provenance", s.provenance},
            {"quarantine", s.quarantine},
            {"audit_events", s.audit.size()}};
}

using Clock = std::function<std::string()>;

inline std::string format_utc(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline Clock system_utc_clock() {
    return [] { return format_utc(std::time(nullptr)); };
}

/// Deterministic clock for tests and fixtures: `start` plus one second per call.
inline Clock stepping_clock(std::time_t start = 1735689600) {
    auto next = std::make_shared<std::time_t>(start);
    return [next] { return format_utc((*next)++); };
}

}  // namespace delphi
