#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "delphi/adapter.hpp"
#include "delphi/corpus.hpp"
#include "delphi/report.hpp"
#include "delphi/serialize.hpp"
#include "delphi/state.hpp"
#include "delphi/validate.hpp"
#include "delphi/workflow.hpp"

namespace delphi {

struct IngestRow {
    std::size_t row = 0;  // 1-based position in the document
    std::string panelist_id;
    std::string item_id;
    int rating = 0;
    std::string justification;
    std::optional<std::string> proposed_statement;
};

struct IngestOutcome {
    ValidationReport report;
    std::size_t accepted = 0;
    std::vector<std::string> accepted_panelists;
    std::vector<std::string> rejected_panelists;
    std::vector<std::string> created_items;
};

struct AiExchangeOutcome {
    ProvenanceLog log;
    std::optional<Response> response;
};

struct AiCollectOutcome {
    std::size_t requested = 0;
    std::size_t ingested = 0;
    std::vector<ProvenanceLog> quarantined;
};

struct AdjudicationOutcome {
    std::string route;  // "annotation" or "reclassification"
    CompatibilityAnnotation annotation;
    std::optional<ConsensusClassification> classification;
};

inline json response_document(const std::vector<IngestRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json j = {{"panelist_id", r.panelist_id},
                  {"item_id", r.item_id},
                  {"rating", r.rating},
                  {"justification", r.justification}};
        detail::put_opt(j, "proposed_statement", r.proposed_statement);
        out.push_back(std::move(j));
    }
    return {{"schema_version", kSchemaVersion}, {"responses", out}};
}

inline std::vector<IngestRow> parse_response_document(const json& doc) {
    require_schema(doc);
    return guard_document([&] {
        if (!doc.contains("responses") || !doc.at("responses").is_array()) {
            throw Error("malformed document", "responses array missing");
        }
        std::vector<IngestRow> rows;
        for (const auto& r : doc.at("responses")) {
            IngestRow row;
            row.row = rows.size() + 1;
            row.panelist_id = r.at("panelist_id").get<std::string>();
            row.item_id = r.at("item_id").get<std::string>();
            const auto& rating = r.at("rating");
            if (!rating.is_number_integer()) {
                throw Error("malformed document", "row " + std::to_string(row.row) + ": rating is not an integer");
            }
            const auto value = rating.get<std::int64_t>();
            row.rating = value < -1000 || value > 1000 ? -1 : static_cast<int>(value);
            row.justification = detail::get_opt<std::string>(r, "justification").value_or("");
            row.proposed_statement = detail::get_opt<std::string>(r, "proposed_statement");
            rows.push_back(std::move(row));
        }
        return rows;
    });
}

/// Id of the item materialized from a participant's "Other" proposal.
inline std::string proposal_item_id(const std::string& slot_id, const std::string& panelist_id) {
    return slot_id + "." + panelist_id;
}

namespace reducer {

inline const Response& require_response(const Study& study, const std::string& rid) {
    const Response* r = find_response_by_id(study, rid);
    if (!r) throw Error("unknown response", rid);
    return *r;
}

inline const Item& require_item(const Study& study, const std::string& item_id) {
    const Item* item = study.find_item(item_id);
    if (!item) throw Error("unknown item", item_id);
    return *item;
}

inline bool blank(const std::string& s) { return detail::trim(s).empty(); }

inline void study_create(StudyState& s, const AuditEvent& ev) {
    if (!s.audit.empty()) throw Error("study exists", s.study.id);
    Study study = parse_study(ev.payload);
    if (study.round_state != WorkflowState::draft) throw Error("invalid study", "new studies start in draft");
    if (!study.responses.empty()) throw Error("invalid study", "new studies carry no responses");
    const auto report = validate_study(study);
    if (!report.ok()) {
        const auto& v = report.violations.front();
        throw Error("invalid study", v.code + " (" + v.subject + ")");
    }
    s.study = std::move(study);
}

inline WorkflowState transition(StudyState& s, const AuditEvent& ev) {
    const auto event = parse_enum<WorkflowEvent>(ev.payload.at("event").get<std::string>());
    Study& study = s.study;
    if (event == WorkflowEvent::emit_report) {
        throw Error("invalid transition", "emit_report happens through report emission");
    }
    const auto target = transition_target(study.round_state, event);
    if (event == WorkflowEvent::finalize_items && study.items.empty()) {
        throw Error("invalid transition", "cannot finalize a study with no items");
    }
    if (event == WorkflowEvent::complete_classification) {
        const auto quorate = quorate_items(study);
        if (quorate.empty()) throw Error("invalid transition", "cannot classify 0 quorate items");
        for (const auto* item : quorate) {
            if (!s.classifications.count(item->id)) {
                throw Error("invalid transition", "item " + item->id + " is quorate but unclassified");
            }
        }
    }
    if (event == WorkflowEvent::finalize_items) {
        for (auto& item : study.items) item.finalized = true;
    }
    study.round_state = target;
    return target;
}

inline IngestOutcome ingest(StudyState& s, const AuditEvent& ev) {
    Study& study = s.study;
    require_state(study.round_state, {WorkflowState::collecting}, "response ingestion");
    const auto rows = parse_response_document(ev.payload);

    IngestOutcome out;
    std::set<std::string> rejected;
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<std::string> order;
    for (const auto& row : rows) {
        if (std::find(order.begin(), order.end(), row.panelist_id) == order.end()) order.push_back(row.panelist_id);
        auto reject = [&](const std::string& code, const std::string& detail) {
            out.report.add(code, response_id(row.item_id, row.panelist_id), detail, row.row);
            rejected.insert(row.panelist_id);
        };
        if (!study.find_panelist(row.panelist_id)) reject("unknown panelist", row.panelist_id);
        const Item* item = study.find_item(row.item_id);
        std::string target = row.item_id;
        if (!item) {
            reject("unknown item", row.item_id);
        } else if (row.proposed_statement) {
            if (item->kind != ItemKind::other_slot || item->origin != ItemOrigin::a_priori) {
                reject("proposal on fixed item", row.item_id);
            } else if (blank(*row.proposed_statement)) {
                reject("empty statement", row.item_id);
            }
            target = proposal_item_id(row.item_id, row.panelist_id);
        } else if (item->kind == ItemKind::other_slot && item->origin == ItemOrigin::a_priori) {
            reject("missing proposal", row.item_id);
        }
        if (row.rating < 1 || row.rating > 5) reject("rating out of range", std::to_string(row.rating));
        if (blank(row.justification)) reject("missing justification", "justification is required");
        if (!seen.insert({target, row.panelist_id}).second || study.find_response(target, row.panelist_id)) {
            reject("duplicate response", target);
        }
    }

    for (const auto& row : rows) {
        if (rejected.count(row.panelist_id)) continue;
        std::string target = row.item_id;
        if (row.proposed_statement) {
            const Item& slot = require_item(study, row.item_id);
            target = proposal_item_id(row.item_id, row.panelist_id);
            Item proposed{target,           slot.section_id, *row.proposed_statement, ItemKind::other_slot,
                          ItemOrigin::participant_proposed, slot.format, true, row.panelist_id};
            study.items.push_back(std::move(proposed));
            out.created_items.push_back(target);
        }
        Response r;
        r.item_id = target;
        r.panelist_id = row.panelist_id;
        r.rating = row.rating;
        r.justification = row.justification;
        study.responses.push_back(std::move(r));
        ++out.accepted;
    }
    for (const auto& p : order) (rejected.count(p) ? out.rejected_panelists : out.accepted_panelists).push_back(p);
    return out;
}

inline AiExchangeOutcome ai_response(StudyState& s, const AuditEvent& ev) {
    Study& study = s.study;
    require_state(study.round_state, {WorkflowState::collecting}, "AI collection");
    const auto panelist_id = ev.payload.at("panelist_id").get<std::string>();
    const auto item_id = ev.payload.at("item_id").get<std::string>();
    if (study.role_of(panelist_id) != Role::ai_respondent) throw Error("not an ai respondent", panelist_id);
    if (!study.corpus) throw Error("missing corpus", study.id);
    const Item& item = require_item(study, item_id);
    const auto prompt = build_prompt(item, *study.corpus, item.format);
    if (prompt.text != ev.payload.at("request").get<std::string>()) {
        throw Error("replay divergence", "prompt for " + item_id + " differs from the recorded request");
    }
    if (study.find_response(item_id, panelist_id)) throw Error("duplicate response", response_id(item_id, panelist_id));
    const auto raw = ev.payload.at("raw_response").get<std::string>();
    const auto adapter = ev.payload.value("adapter", "");
    try {
        auto result = evaluate_ai_exchange(prompt, raw, panelist_id, adapter, ev.timestamp);
        if (result.response) study.responses.push_back(*result.response);
        s.provenance.push_back(result.log);
        return {result.log, result.response};
    } catch (const AiExchangeError& e) {
        s.quarantine.push_back(e.log());
        return {e.log(), std::nullopt};
    }
}

inline CodingRecord coding(StudyState& s, const AuditEvent& ev) {
    require_state(s.study.round_state,
                  {WorkflowState::collecting, WorkflowState::clarifying, WorkflowState::adjudicating}, "coding");
    return record_codes(s.study, s.coding, ev.payload.at("response_id").get<std::string>(),
                        ev.payload.at("codes").get<ReasoningCodeSet>(), ev.actor, ev.timestamp,
                        detail::get_opt<std::string>(ev.payload, "note"));
}

inline void novelty(StudyState& s, const AuditEvent& ev) {
    require_state(s.study.round_state,
                  {WorkflowState::collecting, WorkflowState::clarifying, WorkflowState::adjudicating},
                  "novelty flagging");
    const auto rid = ev.payload.at("response_id").get<std::string>();
    require_response(s.study, rid);
    find_response_by_id(s.study, rid)->novelty_flag = ev.payload.at("novelty_flag").get<bool>();
}

inline ClarificationExchange clarification_request(StudyState& s, const AuditEvent& ev) {
    require_state(s.study.round_state, {WorkflowState::clarifying, WorkflowState::adjudicating}, "clarification");
    const auto rid = ev.payload.at("response_id").get<std::string>();
    require_response(s.study, rid);
    const auto question = ev.payload.at("question").get<std::string>();
    if (blank(question)) throw Error("empty question", rid);
    ClarificationExchange ex{question, std::nullopt, ev.timestamp, std::nullopt};
    find_response_by_id(s.study, rid)->clarification_thread.push_back(ex);
    return ex;
}

inline ClarificationExchange clarification_answer(StudyState& s, const AuditEvent& ev) {
    require_state(s.study.round_state, {WorkflowState::clarifying, WorkflowState::adjudicating}, "clarification");
    const auto rid = ev.payload.at("response_id").get<std::string>();
    require_response(s.study, rid);
    const auto answer = ev.payload.at("answer").get<std::string>();
    if (blank(answer)) throw Error("empty answer", rid);
    auto& thread = find_response_by_id(s.study, rid)->clarification_thread;
    auto it = std::find_if(thread.begin(), thread.end(), [](const ClarificationExchange& e) { return e.open(); });
    if (it == thread.end()) throw Error("no open clarification", rid);
    it->answer = answer;
    it->answered_at = ev.timestamp;
    return *it;
}

inline CompatibilityAnnotation annotation_from(const AuditEvent& ev) {
    CompatibilityAnnotation a;
    a.item_id = ev.payload.at("item_id").get<std::string>();
    a.basis = ev.payload.at("basis").get<Basis>();
    a.rationale = detail::get_opt<std::string>(ev.payload, "rationale").value_or("");
    a.author = ev.actor;
    a.timestamp = ev.timestamp;
    return a;
}

inline CompatibilityAnnotation annotation(StudyState& s, const AuditEvent& ev) {
    require_state(s.study.round_state, {WorkflowState::clarifying, WorkflowState::adjudicating}, "annotation");
    auto a = annotation_from(ev);
    require_item(s.study, a.item_id);
    if (s.classifications.count(a.item_id)) throw Error("item already classified", a.item_id);
    check_annotation(a);
    s.annotations[a.item_id] = a;
    return a;
}

inline std::vector<ConsensusClassification> classify(StudyState& s, const AuditEvent&) {
    require_state(s.study.round_state, {WorkflowState::adjudicating}, "classification");
    std::vector<ConsensusClassification> fresh;
    for (const auto* item : quorate_items(s.study)) {
        if (s.classifications.count(item->id)) continue;
        auto it = s.annotations.find(item->id);
        const auto basis = it == s.annotations.end() ? default_annotation(item->id) : it->second;
        const auto responses = s.study.consensus_responses(item->id);
        fresh.push_back(classify_consensus(*item, responses, basis, s.study.settings.quorum));
    }
    for (const auto& c : fresh) s.classifications[c.item_id] = c;
    return fresh;
}

inline ConsensusClassification reclassification(StudyState& s, const AuditEvent& ev) {
    require_state(s.study.round_state, {WorkflowState::adjudicating}, "reclassification");
    const auto a = annotation_from(ev);
    auto it = s.classifications.find(a.item_id);
    if (it == s.classifications.end()) throw Error("unclassified item", a.item_id);
    auto next = reclassify(it->second, a);
    it->second = next;
    return next;
}

/// Automatic alignment of one item, before any override.
inline AlignmentRecord automatic_alignment(const Study& study, const std::string& item_id) {
    require_item(study, item_id);
    const auto humans = study.consensus_responses(item_id);
    if (humans.empty()) throw Error("no responses", item_id);
    for (const auto* ai : study.panelists_with_role(Role::ai_respondent)) {
        if (const Response* r = study.find_response(item_id, ai->id)) {
            if (!r->coded()) throw Error("incomplete coding", response_id(*r));
            return classify_alignment(*r, Role::ai_respondent, panel_stance(humans), study.settings.alignment_threshold);
        }
    }
    throw Error("no ai response", item_id);
}

inline AlignmentRecord alignment_override(StudyState& s, const AuditEvent& ev) {
    require_state(s.study.round_state,
                  {WorkflowState::clarifying, WorkflowState::adjudicating, WorkflowState::classified},
                  "alignment override");
    const auto item_id = ev.payload.at("item_id").get<std::string>();
    auto rec = automatic_alignment(s.study, item_id);
    AlignmentOverride ov{item_id,
                         ev.payload.at("category").get<AlignmentCategory>(),
                         rec.automatic,
                         detail::get_opt<std::string>(ev.payload, "rationale").value_or(""),
                         ev.actor,
                         ev.timestamp};
    rec = apply_override(rec, ov);
    s.overrides[item_id] = ov;
    return rec;
}

inline void report_emit(StudyState& s, const AuditEvent&) {
    s.study.round_state = transition_target(s.study.round_state, WorkflowEvent::emit_report);
}

using Handler = std::function<void(StudyState&, const AuditEvent&)>;

inline const std::map<std::string, Handler, std::less<>>& handlers() {
    static const std::map<std::string, Handler, std::less<>> table{
        {std::string(actions::study_create), study_create},
        {std::string(actions::transition), [](StudyState& s, const AuditEvent& e) { transition(s, e); }},
        {std::string(actions::ingest), [](StudyState& s, const AuditEvent& e) { ingest(s, e); }},
        {std::string(actions::ai_response), [](StudyState& s, const AuditEvent& e) { ai_response(s, e); }},
        {std::string(actions::coding), [](StudyState& s, const AuditEvent& e) { coding(s, e); }},
        {std::string(actions::novelty), novelty},
        {std::string(actions::clarification_request),
         [](StudyState& s, const AuditEvent& e) { clarification_request(s, e); }},
        {std::string(actions::clarification_answer),
         [](StudyState& s, const AuditEvent& e) { clarification_answer(s, e); }},
        {std::string(actions::annotation), [](StudyState& s, const AuditEvent& e) { annotation(s, e); }},
        {std::string(actions::classify), [](StudyState& s, const AuditEvent& e) { classify(s, e); }},
        {std::string(actions::reclassify), [](StudyState& s, const AuditEvent& e) { reclassification(s, e); }},
        {std::string(actions::alignment_override),
         [](StudyState& s, const AuditEvent& e) { alignment_override(s, e); }},
        {std::string(actions::report_emit), report_emit},
    };
    return table;
}

}  // namespace reducer

/// Applies one logged event. Handlers validate before mutating, so a thrown
/// error leaves `state` untouched.
inline void apply_event(StudyState& state, const AuditEvent& ev) {
    if (ev.seq != state.audit.size() + 1) {
        throw Error("corrupt audit log", "expected seq " + std::to_string(state.audit.size() + 1) + ", found " +
                                             std::to_string(ev.seq));
    }
    if (payload_digest(ev.payload) != ev.payload_digest) {
        throw Error("corrupt audit log", "payload digest mismatch at seq " + std::to_string(ev.seq));
    }
    const auto& table = reducer::handlers();
    auto it = table.find(ev.action);
    if (it == table.end()) throw Error("corrupt audit log", "unknown action " + ev.action);
    guard_document([&] {
        it->second(state, ev);
        return 0;
    });
    state.audit.push_back(ev);
}

inline StudyState replay_events(std::span<const AuditEvent> events) {
    StudyState state;
    for (const auto& ev : events) apply_event(state, ev);
    return state;
}

inline constexpr std::string_view kEventLogFile = "events.jsonl";
inline constexpr std::string_view kSnapshotFile = "study.json";

inline std::vector<AuditEvent> read_event_log(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("unknown study", file.string());
    std::vector<AuditEvent> events;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            events.push_back(json::parse(line).get<AuditEvent>());
        } catch (const json::exception& e) {
            throw Error("corrupt audit log", "line " + std::to_string(events.size() + 1) + ": " + e.what());
        }
    }
    return events;
}

/// Single-writer command surface over one study. Every mutation becomes one
/// audit event; with a directory attached the event is appended to
/// `events.jsonl` before the command returns.
class StudySession {
    StudySession(Clock clock, std::optional<std::filesystem::path> dir)
        : clock_(std::move(clock)), dir_(std::move(dir)) {}

    static json annotation_payload(const std::string& item_id, Basis basis, const std::string& rationale) {
        return {{"item_id", item_id}, {"basis", basis}, {"rationale", rationale}};
    }

    template <typename Fn>
    auto commit(const std::string& actor, std::string_view action, std::string subject, json payload, Fn&& handler) {
        auto ev = make_event(state_.audit.size() + 1, actor, std::string(action), std::move(subject), clock_(),
                             std::move(payload));
        auto run = [&] { return handler(state_, ev); };
        if constexpr (std::is_void_v<decltype(run())>) {
            guard_document([&] {
                run();
                return 0;
            });
            append(std::move(ev));
        } else {
            auto result = guard_document(run);
            append(std::move(ev));
            return result;
        }
    }

    void append(AuditEvent ev) {
        if (dir_) {
            std::ofstream out(*dir_ / kEventLogFile, std::ios::binary | std::ios::app);
            if (!out) throw Error("write failure", (*dir_ / kEventLogFile).string());
            out << json(ev).dump() << '\n';
        }
        state_.audit.push_back(std::move(ev));
    }


public:
    static StudySession create(const Study& study, const std::string& actor, Clock clock = system_utc_clock(),
                               std::optional<std::filesystem::path> dir = std::nullopt) {
        if (dir) {
            if (std::filesystem::exists(*dir / kEventLogFile)) throw Error("study exists", dir->string());
            std::filesystem::create_directories(*dir);
        }
        StudySession session(std::move(clock), std::move(dir));
        Study draft = study;
        draft.round_state = WorkflowState::draft;
        session.commit(actor, actions::study_create, study.id, json(draft), reducer::study_create);
        session.save_snapshot();
        return session;
    }

    static StudySession open(const std::filesystem::path& dir, Clock clock = system_utc_clock()) {
        const auto events = read_event_log(dir / kEventLogFile);
        if (events.empty()) throw Error("unknown study", dir.string());
        StudySession session(std::move(clock), dir);
        session.state_ = replay_events(events);
        return session;
    }

    /// In-memory session rebuilt from an existing log (no directory attached).
    static StudySession from_events(std::span<const AuditEvent> events, Clock clock = system_utc_clock()) {
        StudySession session(std::move(clock), std::nullopt);
        session.state_ = replay_events(events);
        return session;
    }

    const StudyState& state() const { return state_; }
    const Study& study() const { return state_.study; }
    const std::vector<AuditEvent>& audit() const { return state_.audit; }
    const std::optional<std::filesystem::path>& directory() const { return dir_; }

    WorkflowState transition(WorkflowEvent event, const std::string& actor) {
        return commit(actor, actions::transition, state_.study.id, {{"event", enum_name(event)}}, reducer::transition);
    }

    IngestOutcome ingest_responses(const json& document, const std::string& actor) {
        require_state(state_.study.round_state, {WorkflowState::collecting}, "response ingestion");
        (void)parse_response_document(document);
        return commit(actor, actions::ingest, state_.study.id, document, reducer::ingest);
    }

    AiExchangeOutcome record_ai_exchange(const std::string& item_id, const std::string& panelist_id,
                                         const std::string& adapter, const std::string& request,
                                         const std::string& raw, const std::string& actor) {
        json payload = {{"panelist_id", panelist_id},
                        {"item_id", item_id},
                        {"adapter", adapter},
                        {"request", request},
                        {"raw_response", raw}};
        return commit(actor, actions::ai_response, response_id(item_id, panelist_id), std::move(payload),
                      reducer::ai_response);
    }

    /// Prompts the AI respondent for every finalized item it has not yet
    /// answered. Quarantined exchanges are logged, never ingested.
    AiCollectOutcome collect_ai(AiAdapter& adapter, const std::string& panelist_id, const std::string& actor) {
        const Study& study = state_.study;
        require_state(study.round_state, {WorkflowState::collecting}, "AI collection");
        if (study.role_of(panelist_id) != Role::ai_respondent) throw Error("not an ai respondent", panelist_id);
        if (!study.corpus) throw Error("missing corpus", study.id);
        std::vector<Item> pending;
        for (const auto& item : study.items) {
            const bool answered = std::any_of(state_.provenance.begin(), state_.provenance.end(),
                                              [&](const ProvenanceLog& p) {
                                                  return p.item_id == item.id && p.panelist_id == panelist_id;
                                              });
            if (item.origin == ItemOrigin::a_priori && item.kind == ItemKind::fixed && !answered &&
                !study.find_response(item.id, panelist_id)) {
                pending.push_back(item);
            }
        }
        AiCollectOutcome out;
        for (const auto& item : pending) {
            const auto prompt = build_prompt(item, *state_.study.corpus, item.format);
            const auto raw = adapter.complete(prompt.text);
            ++out.requested;
            auto result = record_ai_exchange(item.id, panelist_id, adapter.name(), prompt.text, raw, actor);
            if (result.log.outcome == "ingested") {
                ++out.ingested;
            } else {
                out.quarantined.push_back(result.log);
            }
        }
        return out;
    }

    CodingRecord code_response(const std::string& rid, const ReasoningCodeSet& codes, const std::string& coder,
                               std::optional<std::string> note = std::nullopt) {
        json payload = {{"response_id", rid}, {"codes", codes}};
        detail::put_opt(payload, "note", note);
        return commit(coder, actions::coding, rid, std::move(payload), reducer::coding);
    }

    void flag_novelty(const std::string& rid, bool flag, const std::string& actor) {
        commit(actor, actions::novelty, rid, {{"response_id", rid}, {"novelty_flag", flag}}, reducer::novelty);
    }

    ClarificationExchange request_clarification(const std::string& item_id, const std::string& panelist_id,
                                                const std::string& question, const std::string& actor) {
        const auto rid = response_id(item_id, panelist_id);
        return commit(actor, actions::clarification_request, rid, {{"response_id", rid}, {"question", question}},
                      reducer::clarification_request);
    }

    ClarificationExchange record_answer(const std::string& item_id, const std::string& panelist_id,
                                        const std::string& answer, const std::string& actor) {
        const auto rid = response_id(item_id, panelist_id);
        return commit(actor, actions::clarification_answer, rid, {{"response_id", rid}, {"answer", answer}},
                      reducer::clarification_answer);
    }

    CompatibilityAnnotation annotate(const std::string& item_id, Basis basis, const std::string& rationale,
                                     const std::string& actor) {
        return commit(actor, actions::annotation, item_id, annotation_payload(item_id, basis, rationale),
                      reducer::annotation);
    }

    std::vector<ConsensusClassification> classify_all(const std::string& actor) {
        return commit(actor, actions::classify, state_.study.id, json::object(), reducer::classify);
    }

    ConsensusClassification reclassify_item(const std::string& item_id, Basis basis, const std::string& rationale,
                                            const std::string& actor) {
        return commit(actor, actions::reclassify, item_id, annotation_payload(item_id, basis, rationale),
                      reducer::reclassification);
    }

    /// Routes a facilitator decision: unclassified items take a compatibility
    /// annotation, classified items a reclassification.
    AdjudicationOutcome adjudicate(const std::string& item_id, Basis basis, const std::string& rationale,
                                   const std::string& actor) {
        reducer::require_item(state_.study, item_id);
        if (state_.classifications.count(item_id)) {
            auto c = reclassify_item(item_id, basis, rationale, actor);
            return {"reclassification", c.basis, c};
        }
        return {"annotation", annotate(item_id, basis, rationale, actor), std::nullopt};
    }

    AlignmentRecord override_alignment(const std::string& item_id, AlignmentCategory category,
                                       const std::string& rationale, const std::string& actor) {
        json payload = {{"item_id", item_id}, {"category", category}, {"rationale", rationale}};
        return commit(actor, actions::alignment_override, item_id, std::move(payload), reducer::alignment_override);
    }

    /// Renders the report, logs its emission (moving the study to reported)
    /// and writes the files when a directory is attached.
    RenderedReport emit_report(const std::string& actor) {
        auto rendered = render_report(state_);
        json files = {{std::string(kReportMarkdownFile), sha256_hex(rendered.markdown)},
                      {std::string(kTiersCsvFile), sha256_hex(rendered.tiers_csv)},
                      {std::string(kReportJsonFile), sha256_hex(rendered.json_text)}};
        commit(actor, actions::report_emit, state_.study.id, {{"files", files}}, reducer::report_emit);
        if (dir_) write_report_files(*dir_, rendered);
        return rendered;
    }

    void save_snapshot() const {
        if (dir_) write_text_file(*dir_ / kSnapshotFile, snapshot_json(state_).dump(2) + "\n");
    }

private:
    StudyState state_;
    Clock clock_;
    std::optional<std::filesystem::path> dir_;
};

}  // namespace delphi
