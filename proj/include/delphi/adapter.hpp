#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delphi/corpus.hpp"
#include "delphi/error.hpp"
#include "delphi/model.hpp"

namespace delphi {

/// Request/response text boundary around the AI respondent. Requests are
/// prompt texts; responses follow the line protocol named in the prompt.
class AiAdapter {
public:
    virtual ~AiAdapter() = default;
    virtual std::string complete(const std::string& request) = 0;
    virtual std::string name() const = 0;
};

struct ProvenanceLog {
    std::string item_id;
    std::string panelist_id;
    std::string adapter;
    std::string protocol;
    std::string request;
    std::string raw_response;
    std::vector<std::string> cited;
    std::vector<std::string> admitted;
    std::string timestamp;
    std::string outcome;  // "ingested", "quarantined", "malformed"
    std::string detail;

    bool operator==(const ProvenanceLog&) const = default;
};

/// Carries the exchange that failed so callers can quarantine it.
class AiExchangeError : public Error {
public:
    AiExchangeError(std::string code, const std::string& detail, ProvenanceLog log)
        : Error(std::move(code), detail), log_(std::move(log)) {}
    const ProvenanceLog& log() const { return log_; }

private:
    ProvenanceLog log_;
};

struct AiAnswer {
    ResponseFormat format = ResponseFormat::likert;
    std::optional<int> rating;
    std::optional<bool> decision;
    std::optional<int> priority;
    std::string justification;
    std::vector<std::string> cited;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::optional<int> parse_int(const std::string& s) {
    if (s.empty() || s.size() > 3) return std::nullopt;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
    }
    return std::stoi(s);
}

}  // namespace detail

/// Parses `key: value` lines. Throws "malformed AI response" on any
/// protocol, range or completeness problem.
inline AiAnswer parse_ai_output(const std::string& text, ResponseFormat format) {
    std::map<std::string, std::string> fields;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        start = end + 1;
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        const auto key = detail::trim(line.substr(0, colon));
        if (!fields.count(key)) fields[key] = detail::trim(line.substr(colon + 1));
    }
    auto fail = [](const std::string& why) -> AiAnswer { throw Error("malformed AI response", why); };

    if (fields["protocol"] != protocol_tag()) return fail("protocol line missing or not " + protocol_tag());
    AiAnswer a;
    a.format = format;
    switch (format) {
        case ResponseFormat::likert: {
            auto v = detail::parse_int(fields["rating"]);
            if (!v || *v < 1 || *v > 5) return fail("rating '" + fields["rating"] + "' outside 1-5");
            a.rating = v;
            break;
        }
        case ResponseFormat::binary: {
            const auto& d = fields["decision"];
            if (d != "yes" && d != "no") return fail("decision '" + d + "' is not yes/no");
            a.decision = d == "yes";
            break;
        }
        case ResponseFormat::prioritisation: {
            auto v = detail::parse_int(fields["priority"]);
            if (!v || *v < 1 || *v > 5) return fail("priority '" + fields["priority"] + "' outside 1-5");
            a.priority = v;
            break;
        }
    }
    a.justification = fields["justification"];
    if (a.justification.empty()) return fail("empty justification");
    const auto& src = fields["sources"];
    std::size_t p = 0;
    while (p < src.size()) {
        auto comma = src.find(',', p);
        if (comma == std::string::npos) comma = src.size();
        auto id = detail::trim(src.substr(p, comma - p));
        if (!id.empty()) a.cited.push_back(id);
        p = comma + 1;
    }
    return a;
}

struct AiResult {
    AiAnswer answer;
    std::optional<Response> response;  // Likert answers only
    ProvenanceLog log;
};

/// Validates one raw exchange against the prompt it answered. Used both
/// live (after the adapter call) and when replaying recorded exchanges.
inline AiResult evaluate_ai_exchange(const PromptDocument& prompt, const std::string& raw,
                                     const std::string& panelist_id, const std::string& adapter_name,
                                     const std::string& timestamp) {
    ProvenanceLog log{prompt.item_id, panelist_id,  adapter_name, protocol_tag(), prompt.text, raw, {},
                      prompt.admitted_source_ids, timestamp, "malformed", {}};
    AiAnswer answer;
    try {
        answer = parse_ai_output(raw, prompt.format);
    } catch (const Error& e) {
        log.detail = e.what();
        throw AiExchangeError("malformed AI response", e.what(), log);
    }
    log.cited = answer.cited;
    const std::set<std::string> admitted(prompt.admitted_source_ids.begin(), prompt.admitted_source_ids.end());
    for (const auto& id : answer.cited) {
        if (!admitted.count(id)) {
            log.outcome = "quarantined";
            log.detail = "cited source '" + id + "' is outside the admitted corpus";
            throw AiExchangeError("corpus violation", log.detail, log);
        }
    }
    log.outcome = "ingested";
    AiResult result{answer, std::nullopt, log};
    if (answer.rating) {
        Response r;
        r.item_id = prompt.item_id;
        r.panelist_id = panelist_id;
        r.rating = *answer.rating;
        r.justification = answer.justification;
        result.response = r;
    }
    return result;
}

inline AiResult ai_respond(AiAdapter& adapter, const PromptDocument& prompt, const std::string& panelist_id,
                           const std::string& timestamp) {
    const auto raw = adapter.complete(prompt.text);
    return evaluate_ai_exchange(prompt, raw, panelist_id, adapter.name(), timestamp);
}

/// Formats an answer in the response protocol.
inline std::string format_ai_answer(const AiAnswer& a) {
    std::string out = "protocol: " + protocol_tag() + "\n";
    if (a.rating) out += "rating: " + std::to_string(*a.rating) + "\n";
    if (a.decision) out += std::string("decision: ") + (*a.decision ? "yes" : "no") + "\n";
    if (a.priority) out += "priority: " + std::to_string(*a.priority) + "\n";
    out += "justification: " + a.justification + "\n";
    out += "sources: ";
    for (std::size_t i = 0; i < a.cited.size(); ++i) out += (i ? ", " : "") + a.cited[i];
    out += "\n";
    return out;
}

inline std::string request_item_id(const std::string& request) {
    const std::string tag = "\nitem_id: ";
    const auto p = request.find(tag);
    if (p == std::string::npos) return {};
    const auto start = p + tag.size();
    return request.substr(start, request.find('\n', start) - start);
}

/// Deterministic canned answers keyed by item id.
class MockAdapter : public AiAdapter {
public:
    MockAdapter() = default;
    explicit MockAdapter(std::map<std::string, std::string> raw_by_item) : raw_(std::move(raw_by_item)) {}

    void set(const std::string& item_id, std::string raw) { raw_[item_id] = std::move(raw); }
    void set(const std::string& item_id, const AiAnswer& answer) { raw_[item_id] = format_ai_answer(answer); }

    /// {"<item_id>": {"rating": 4, "justification": "...", "sources": ["s1"]}, ...}
    /// or {"<item_id>": "<raw protocol text>"}.
    static MockAdapter from_json(const nlohmann::json& j) {
        MockAdapter m;
        for (const auto& [item, v] : j.items()) {
            if (v.is_string()) {
                m.set(item, v.get<std::string>());
                continue;
            }
            AiAnswer a;
            if (v.contains("rating")) a.rating = v.at("rating").get<int>();
            if (v.contains("decision")) a.decision = v.at("decision").get<bool>();
            if (v.contains("priority")) a.priority = v.at("priority").get<int>();
            a.justification = v.value("justification", "");
            a.cited = v.value("sources", std::vector<std::string>{});
            m.set(item, a);
        }
        return m;
    }

    std::string complete(const std::string& request) override {
        const auto id = request_item_id(request);
        auto it = raw_.find(id);
        if (it == raw_.end()) throw Error("adapter failure", "mock has no answer for item '" + id + "'");
        return it->second;
    }
    std::string name() const override { return "mock"; }

private:
    std::map<std::string, std::string> raw_;
};

struct TranscriptEntry {
    std::string request;
    std::string response;
};

/// Wraps another adapter and keeps every exchange verbatim; optionally
/// appends each one to a JSON-lines file.
class RecordingAdapter : public AiAdapter {
public:
    RecordingAdapter(AiAdapter& inner, std::optional<std::string> path = std::nullopt)
        : inner_(inner), path_(std::move(path)) {}

    std::string complete(const std::string& request) override {
        auto response = inner_.complete(request);
        entries_.push_back({request, response});
        if (path_) {
            std::ofstream out(*path_, std::ios::app);
            out << nlohmann::json{{"request", request}, {"response", response}}.dump() << '\n';
        }
        return response;
    }
    std::string name() const override { return inner_.name(); }
    const std::vector<TranscriptEntry>& entries() const { return entries_; }

private:
    AiAdapter& inner_;
    std::optional<std::string> path_;
    std::vector<TranscriptEntry> entries_;
};

/// Serves recorded responses for byte-identical requests.
class ReplayAdapter : public AiAdapter {
public:
    explicit ReplayAdapter(std::vector<TranscriptEntry> entries) {
        for (auto& e : entries) by_request_.emplace(std::move(e.request), std::move(e.response));
    }

    static ReplayAdapter from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("malformed document", "cannot read transcript " + path);
        std::vector<TranscriptEntry> entries;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                auto j = nlohmann::json::parse(line);
                entries.push_back({j.at("request").get<std::string>(), j.at("response").get<std::string>()});
            } catch (const nlohmann::json::exception& e) {
                throw Error("malformed document", std::string("transcript: ") + e.what());
            }
        }
        return ReplayAdapter(std::move(entries));
    }

    std::string complete(const std::string& request) override {
        auto it = by_request_.find(request);
        if (it == by_request_.end()) throw Error("replay miss", "no recorded response for item '" + request_item_id(request) + "'");
        return it->second;
    }
    std::string name() const override { return "replay"; }

private:
    std::map<std::string, std::string> by_request_;
};

}  // namespace delphi
