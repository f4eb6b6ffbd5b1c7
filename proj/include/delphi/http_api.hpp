#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include <httplib.h>

#include "delphi/saturation.hpp"
#include "delphi/serialize.hpp"
#include "delphi/session.hpp"

namespace delphi {

struct ApiResponse {
    int status = 200;
    json body;
};

using QueryParams = std::map<std::string, std::string>;

inline int status_for(const std::string& code) {
    static const std::set<std::string> not_found{"unknown study", "unknown item", "unknown response",
                                                 "unknown panelist", "no ai response", "not found"};
    static const std::set<std::string> conflict{
        "invalid transition",      "illegal reclassification", "item already classified", "study exists",
        "no open clarification",   "incomplete coding",        "incomplete classification",
        "incomplete alignment",    "unclassified item",        "insufficient quorum",
        "replay divergence"};
    if (not_found.count(code)) return 404;
    if (conflict.count(code)) return 409;
    return 400;
}

inline ApiResponse error_response(const Error& e) {
    return {status_for(e.code()), {{"schema_version", kSchemaVersion},
                                   {"error", {{"code", e.code()}, {"message", e.what()}}}}};
}

/// Transport-free request handler for the study API. Each study directory
/// under `root` is loaded on first use; mutations take the study's writer
/// lock, reads a shared lock.
class ApiService {
public:
    explicit ApiService(std::filesystem::path root, Clock clock = system_utc_clock())
        : root_(std::move(root)), clock_(std::move(clock)) {}

    ApiResponse handle(const std::string& method, const std::string& path, const QueryParams& query,
                       const std::string& body) {
        try {
            return dispatch(method, path, query, body);
        } catch (const Error& e) {
            return error_response(e);
        } catch (const json::exception& e) {
            return error_response(Error("malformed document", e.what()));
        }
    }

private:
    struct Entry {
        std::shared_mutex mutex;
        std::unique_ptr<StudySession> session;
    };

    static std::vector<std::string> segments(const std::string& path) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : path) {
            if (c == '/') {
                if (!cur.empty()) out.push_back(std::move(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) out.push_back(std::move(cur));
        return out;
    }

    static bool valid_study_id(const std::string& id) {
        if (id.empty() || id == "." || id == "..") return false;
        return std::all_of(id.begin(), id.end(),
                           [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'; });
    }

    Entry& entry(const std::string& id) {
        if (!valid_study_id(id)) throw Error("unknown study", id);
        std::lock_guard lock(registry_mutex_);
        auto& slot = entries_[id];
        if (!slot) {
            auto fresh = std::make_unique<Entry>();
            fresh->session = std::make_unique<StudySession>(StudySession::open(root_ / id, clock_));
            slot = std::move(fresh);
        }
        return *slot;
    }

    static json parse_body(const std::string& body) {
        auto j = parse_json_text(body);
        require_schema(j);
        return j;
    }

    static std::string actor_of(const json& j) {
        return detail::get_opt<std::string>(j, "actor").value_or("facilitator");
    }

    template <typename F>
    static ApiResponse read(Entry& e, F&& f) {
        std::shared_lock lock(e.mutex);
        return {200, f(static_cast<const StudySession&>(*e.session))};
    }

    template <typename F>
    static ApiResponse write(Entry& e, F&& f) {
        std::unique_lock lock(e.mutex);
        json out = f(*e.session);
        e.session->save_snapshot();
        return {200, out};
    }

    ApiResponse dispatch(const std::string& method, const std::string& path, const QueryParams& query,
                         const std::string& body) {
        const auto parts = segments(path);
        if (parts.size() < 2 || parts.size() > 3 || parts[0] != "studies") throw Error("not found", path);
        const std::string resource = parts.size() == 3 ? parts[2] : "";
        static const std::map<std::string, std::string> allowed{
            {"", "GET"},           {"transition", "POST"}, {"responses", "POST"},      {"consensus", "GET"},
            {"saturation", "GET"}, {"alignment", "GET"},   {"adjudications", "POST"}, {"clarifications", "POST"},
            {"report", "GET"}};
        auto route = allowed.find(resource);
        if (route == allowed.end()) throw Error("not found", path);
        if (route->second != method) {
            return {405, {{"schema_version", kSchemaVersion},
                          {"error", {{"code", "method not allowed"}, {"message", method + " " + path}}}}};
        }
        Entry& e = entry(parts[1]);

        if (resource.empty()) return read(e, [](const StudySession& s) { return study_view(s); });
        if (resource == "consensus") return read(e, [](const StudySession& s) { return consensus_view(s); });
        if (resource == "alignment") {
            return read(e, [](const StudySession& s) {
                return alignment_json(alignment_summary(s.study(), s.state().overrides));
            });
        }
        if (resource == "saturation") {
            return read(e, [&](const StudySession& s) { return saturation_view(s, query); });
        }
        if (resource == "report") {
            return read(e, [](const StudySession& s) {
                const auto r = render_report(s.state());
                return json{{"schema_version", kSchemaVersion},
                            {"report", json::parse(r.json_text)},
                            {"markdown", r.markdown},
                            {"tiers_csv", r.tiers_csv}};
            });
        }

        const json req = parse_body(body);
        const auto actor = actor_of(req);
        if (resource == "transition") {
            return write(e, [&](StudySession& s) {
                const auto event = parse_enum<WorkflowEvent>(req.at("event").get<std::string>());
                json out = {{"schema_version", kSchemaVersion}};
                if (event == WorkflowEvent::emit_report) {
                    s.emit_report(actor);
                    out["files"] = {std::string(kReportMarkdownFile), std::string(kTiersCsvFile),
                                    std::string(kReportJsonFile)};
                } else {
                    s.transition(event, actor);
                }
                out["state"] = s.study().round_state;
                out["audit_events"] = s.audit().size();
                return out;
            });
        }
        if (resource == "responses") {
            return write(e, [&](StudySession& s) {
                const auto outcome = s.ingest_responses(req, actor);
                return json{{"schema_version", kSchemaVersion},
                            {"accepted", outcome.accepted},
                            {"accepted_panelists", outcome.accepted_panelists},
                            {"rejected_panelists", outcome.rejected_panelists},
                            {"created_items", outcome.created_items},
                            {"report", outcome.report}};
            });
        }
        if (resource == "adjudications") {
            return write(e, [&](StudySession& s) {
                const auto item_id = req.at("item_id").get<std::string>();
                const auto rationale = detail::get_opt<std::string>(req, "rationale").value_or("");
                if (req.contains("alignment_category")) {
                    const auto rec = s.override_alignment(item_id, req.at("alignment_category").get<AlignmentCategory>(),
                                                          rationale, actor);
                    return json{{"schema_version", kSchemaVersion}, {"route", "alignment_override"}, {"alignment", rec}};
                }
                const auto outcome = s.adjudicate(item_id, req.at("basis").get<Basis>(), rationale, actor);
                json out = {{"schema_version", kSchemaVersion},
                            {"route", outcome.route},
                            {"annotation", outcome.annotation}};
                if (outcome.classification) out["classification"] = *outcome.classification;
                return out;
            });
        }
        // clarifications
        return write(e, [&](StudySession& s) {
            const auto item_id = req.at("item_id").get<std::string>();
            const auto panelist_id = req.at("panelist_id").get<std::string>();
            const bool answering = req.contains("answer");
            const auto ex = answering ? s.record_answer(item_id, panelist_id, req.at("answer").get<std::string>(), actor)
                                      : s.request_clarification(item_id, panelist_id,
                                                                req.at("question").get<std::string>(), actor);
            return json{{"schema_version", kSchemaVersion},
                        {"response_id", response_id(item_id, panelist_id)},
                        {"exchange", ex}};
        });
    }

    static json study_view(const StudySession& s) {
        const auto& st = s.state();
        std::size_t coded = 0;
        for (const auto& r : st.study.responses) coded += r.coded() ? 1 : 0;
        return {{"schema_version", kSchemaVersion},
                {"study", st.study},
                {"summary",
                 {{"state", st.study.round_state},
                  {"items", st.study.items.size()},
                  {"panelists", st.study.panel.size()},
                  {"responses", st.study.responses.size()},
                  {"coded_responses", coded},
                  {"classified", st.classifications.size()},
                  {"quarantined", st.quarantine.size()},
                  {"audit_events", st.audit.size()}}}};
    }

    /// Classifications plus a preview tier for every quorate item still awaiting classification.
    static json consensus_view(const StudySession& s) {
        const auto& st = s.state();
        json pending = json::array();
        for (const auto* item : quorate_items(st.study)) {
            if (st.classifications.count(item->id)) continue;
            auto it = st.annotations.find(item->id);
            const auto basis = it == st.annotations.end() ? default_annotation(item->id) : it->second;
            const auto preview =
                classify_consensus(*item, st.study.consensus_responses(item->id), basis, st.study.settings.quorum);
            pending.push_back({{"item_id", item->id},
                               {"suggested_tier", preview.tier},
                               {"agreement", preview.agreement},
                               {"basis", basis}});
        }
        const auto ordered = ordered_classifications(st.study, st.classifications);
        json out = {{"schema_version", kSchemaVersion},
                    {"state", st.study.round_state},
                    {"classifications", ordered},
                    {"pending", pending}};
        out["tally"] = ordered.empty() ? json(nullptr) : tally_json(tally(ordered));
        return out;
    }

    static json saturation_view(const StudySession& s, const QueryParams& query) {
        auto get = [&](const char* key) -> std::optional<std::string> {
            auto it = query.find(key);
            return it == query.end() ? std::nullopt : std::optional(it->second);
        };
        const Role role = parse_enum<Role>(get("role").value_or("senior_expert"));
        RobustnessMode mode;
        const auto mode_name = get("mode").value_or("exhaustive");
        if (mode_name == "sampled") {
            mode.kind = RobustnessMode::Kind::sampled;
            if (auto c = get("count")) mode.count = parse_count(*c);
            if (auto seed = get("seed")) mode.seed = parse_count(*seed);
        } else if (mode_name != "exhaustive") {
            throw Error("invalid mode", mode_name);
        }
        return saturation_json(permutation_robustness(s.study(), role, mode));
    }

    static std::uint64_t parse_count(const std::string& text) {
        if (text.empty() || text.size() > 19 ||
            !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            throw Error("invalid parameter", text);
        }
        return std::stoull(text);
    }

    std::filesystem::path root_;
    Clock clock_;
    std::mutex registry_mutex_;
    std::map<std::string, std::unique_ptr<Entry>> entries_;
};

/// Binds an ApiService to an httplib server. The caller owns both.
inline void bind_http(httplib::Server& server, ApiService& api) {
    auto handler = [&api](const httplib::Request& req, httplib::Response& res) {
        QueryParams query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        const auto out = api.handle(req.method, req.path, query, req.body);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
    };
    server.Get(R"(/.*)", handler);
    server.Post(R"(/.*)", handler);
    server.Put(R"(/.*)", handler);
    server.Delete(R"(/.*)", handler);
}

}  // namespace delphi
