#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "delphi/adapter.hpp"
#include "delphi/alignment.hpp"
#include "delphi/coding.hpp"
#include "delphi/consensus.hpp"
#include "delphi/corpus.hpp"
#include "delphi/model.hpp"
#include "delphi/saturation.hpp"
#include "delphi/validate.hpp"

namespace nlohmann {
template <>
struct adl_serializer<delphi::Rational> {
    static void to_json(json& j, const delphi::Rational& r) { j = delphi::to_string(r); }
    static void from_json(const json& j, delphi::Rational& r) {
        r = j.is_number_integer() ? delphi::Rational(j.get<std::int64_t>()) : delphi::parse_rational(j.get<std::string>());
    }
};
}  // namespace nlohmann

namespace delphi {

using json = nlohmann::json;

inline constexpr std::string_view kSchemaVersion = "1";

template <typename E>
    requires requires { EnumNames<E>::entries; }
void to_json(json& j, E e) {
    j = std::string(enum_name(e));
}

template <typename E>
    requires requires { EnumNames<E>::entries; }
void from_json(const json& j, E& e) {
    e = parse_enum<E>(j.get<std::string>());
}

inline void to_json(json& j, Category c) { j = std::string(to_string(c)); }
inline void from_json(const json& j, Category& c) { c = parse_category(j.get<std::string>()); }

inline void to_json(json& j, const ReasoningCodeSet& s) {
    j = json::array();
    for (auto c : s.categories()) j.push_back(std::string(to_string(c)));
}
inline void from_json(const json& j, ReasoningCodeSet& s) {
    s = {};
    for (const auto& v : j) s.insert(parse_category(v.get<std::string>()));
}

namespace detail {

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

}  // namespace detail

inline void to_json(json& j, const CalendarDate& d) { j = d.to_string(); }
inline void from_json(const json& j, CalendarDate& d) { d = CalendarDate::parse(j.get<std::string>()); }

inline void to_json(json& j, const SourceRecord& s) {
    j = {{"id", s.id},
         {"title", s.title},
         {"category", s.category},
         {"publication_date", s.publication_date},
         {"access", s.access},
         {"trust_level", s.trust_level}};
    detail::put_opt(j, "vetting_note", s.vetting_note);
}
inline void from_json(const json& j, SourceRecord& s) {
    s.id = j.at("id").get<std::string>();
    s.title = j.value("title", "");
    s.category = j.at("category").get<SourceCategory>();
    s.publication_date = j.at("publication_date").get<std::string>();
    s.access = j.contains("access") ? j.at("access").get<Access>() : Access::public_access;
    s.trust_level = j.at("trust_level").get<int>();
    s.vetting_note = detail::get_opt<std::string>(j, "vetting_note");
}

inline void to_json(json& j, const VettingRecord& v) {
    j = {{"source_id", v.source_id}, {"approved_by", v.approved_by}, {"note", v.note}};
}
inline void from_json(const json& j, VettingRecord& v) {
    v.source_id = j.at("source_id").get<std::string>();
    v.approved_by = j.value("approved_by", "");
    v.note = j.value("note", "");
}

inline void to_json(json& j, const CorpusSpec& c) {
    j = {{"cutoff_date", c.cutoff_date},
         {"categories", c.categories},
         {"exclusions", c.exclusions},
         {"vetting", c.vetting},
         {"sources", c.sources},
         {"trust_levels", c.trust_levels}};
}
inline void from_json(const json& j, CorpusSpec& c) {
    c = {};
    c.cutoff_date = j.at("cutoff_date").get<CalendarDate>();
    if (j.contains("categories")) c.categories = j.at("categories").get<std::set<SourceCategory>>();
    if (j.contains("exclusions")) c.exclusions = j.at("exclusions").get<std::set<SourceCategory>>();
    if (j.contains("vetting")) c.vetting = j.at("vetting").get<std::vector<VettingRecord>>();
    if (j.contains("sources")) c.sources = j.at("sources").get<std::vector<SourceRecord>>();
    if (j.contains("trust_levels")) c.trust_levels = j.at("trust_levels").get<std::map<std::string, int>>();
}

inline void to_json(json& j, const ThematicSection& s) { j = {{"id", s.id}, {"name", s.name}}; }
inline void from_json(const json& j, ThematicSection& s) {
    s.id = j.at("id").get<std::string>();
    s.name = j.at("name").get<std::string>();
}

inline void to_json(json& j, const Item& i) {
    j = {{"id", i.id},         {"section_id", i.section_id}, {"statement", i.statement},
         {"kind", i.kind},     {"origin", i.origin},         {"format", i.format},
         {"finalized", i.finalized}};
    detail::put_opt(j, "proposed_by", i.proposed_by);
}
inline void from_json(const json& j, Item& i) {
    i.id = j.at("id").get<std::string>();
    i.section_id = j.at("section_id").get<std::string>();
    i.statement = j.at("statement").get<std::string>();
    i.kind = j.contains("kind") ? j.at("kind").get<ItemKind>() : ItemKind::fixed;
    i.origin = j.contains("origin") ? j.at("origin").get<ItemOrigin>() : ItemOrigin::a_priori;
    i.format = j.contains("format") ? j.at("format").get<ResponseFormat>() : ResponseFormat::likert;
    i.finalized = j.value("finalized", false);
    i.proposed_by = detail::get_opt<std::string>(j, "proposed_by");
}

inline void to_json(json& j, const Panelist& p) { j = {{"id", p.id}, {"role", p.role}, {"label", p.label}}; }
inline void from_json(const json& j, Panelist& p) {
    p.id = j.at("id").get<std::string>();
    p.role = j.at("role").get<Role>();
    p.label = j.value("label", "");
}

inline void to_json(json& j, const ClarificationExchange& e) {
    j = {{"question", e.question}, {"timestamp", e.timestamp}};
    detail::put_opt(j, "answer", e.answer);
    detail::put_opt(j, "answered_at", e.answered_at);
}
inline void from_json(const json& j, ClarificationExchange& e) {
    e.question = j.at("question").get<std::string>();
    e.timestamp = j.value("timestamp", "");
    e.answer = detail::get_opt<std::string>(j, "answer");
    e.answered_at = detail::get_opt<std::string>(j, "answered_at");
}

inline void to_json(json& j, const Response& r) {
    j = {{"item_id", r.item_id},
         {"panelist_id", r.panelist_id},
         {"rating", r.rating},
         {"justification", r.justification},
         {"codes", r.codes},
         {"novelty_flag", r.novelty_flag},
         {"clarification_thread", r.clarification_thread}};
}
inline void from_json(const json& j, Response& r) {
    r.item_id = j.at("item_id").get<std::string>();
    r.panelist_id = j.at("panelist_id").get<std::string>();
    r.rating = j.at("rating").get<int>();
    r.justification = j.value("justification", "");
    r.codes = j.contains("codes") ? j.at("codes").get<ReasoningCodeSet>() : ReasoningCodeSet{};
    r.novelty_flag = j.value("novelty_flag", false);
    if (j.contains("clarification_thread")) {
        r.clarification_thread = j.at("clarification_thread").get<std::vector<ClarificationExchange>>();
    }
}

inline void to_json(json& j, const StudySettings& s) {
    j = {{"quorum", s.quorum},
         {"consensus_roles", s.consensus_roles},
         {"alignment_threshold", s.alignment_threshold},
         {"max_ai_respondents", s.max_ai_respondents}};
}
inline void from_json(const json& j, StudySettings& s) {
    s = {};
    s.quorum = j.value("quorum", s.quorum);
    if (j.contains("consensus_roles")) s.consensus_roles = j.at("consensus_roles").get<std::vector<Role>>();
    if (j.contains("alignment_threshold")) s.alignment_threshold = j.at("alignment_threshold").get<Rational>();
    s.max_ai_respondents = j.value("max_ai_respondents", s.max_ai_respondents);
}

inline void to_json(json& j, const Study& s) {
    j = {{"schema_version", kSchemaVersion},
         {"id", s.id},
         {"title", s.title},
         {"settings", s.settings},
         {"sections", s.sections},
         {"items", s.items},
         {"panel", s.panel},
         {"round_state", s.round_state},
         {"responses", s.responses}};
    detail::put_opt(j, "corpus", s.corpus);
}

inline void require_schema(const json& j) {
    if (!j.is_object() || !j.contains("schema_version")) throw Error("malformed document", "missing schema_version");
    const auto& v = j.at("schema_version");
    if (!v.is_string() || v.get<std::string>() != kSchemaVersion) {
        throw Error("unsupported schema version", v.dump());
    }
}

inline void from_json(const json& j, Study& s) {
    s = {};
    s.id = j.at("id").get<std::string>();
    s.title = j.value("title", "");
    if (j.contains("settings")) s.settings = j.at("settings").get<StudySettings>();
    s.sections = j.value("sections", std::vector<ThematicSection>{});
    s.items = j.value("items", std::vector<Item>{});
    s.panel = j.value("panel", std::vector<Panelist>{});
    s.round_state = j.contains("round_state") ? j.at("round_state").get<WorkflowState>() : WorkflowState::draft;
    s.corpus = detail::get_opt<CorpusSpec>(j, "corpus");
    s.responses = j.value("responses", std::vector<Response>{});
}

/// Converts library/parse failures into "malformed document".
template <typename F>
auto guard_document(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error&) {
        throw;
    } catch (const json::exception& e) {
        throw Error("malformed document", e.what());
    }
}

inline json parse_json_text(const std::string& text) {
    return guard_document([&] { return json::parse(text); });
}

inline Study parse_study(const json& j) {
    require_schema(j);
    return guard_document([&] { return j.get<Study>(); });
}

inline void to_json(json& j, const Violation& v) {
    j = {{"code", v.code}, {"subject", v.subject}, {"detail", v.detail}};
    detail::put_opt(j, "row", v.row);
}
inline void to_json(json& j, const ValidationReport& r) {
    j = {{"schema_version", kSchemaVersion}, {"ok", r.ok()}, {"violations", r.violations}};
}

inline void to_json(json& j, const AgreementSummary& a) {
    j = {{"n_total", a.n_total},       {"n_positive", a.n_positive},
         {"n_negative", a.n_negative}, {"n_neutral", a.n_neutral},
         {"direction", a.direction},   {"fraction", a.fraction}};
}
inline void from_json(const json& j, AgreementSummary& a) {
    a.n_total = j.at("n_total").get<std::size_t>();
    a.n_positive = j.at("n_positive").get<std::size_t>();
    a.n_negative = j.at("n_negative").get<std::size_t>();
    a.n_neutral = j.at("n_neutral").get<std::size_t>();
    a.direction = j.at("direction").get<Direction>();
    a.fraction = j.at("fraction").get<Rational>();
}

inline void to_json(json& j, const CompatibilityAnnotation& a) {
    j = {{"item_id", a.item_id},
         {"basis", a.basis},
         {"rationale", a.rationale},
         {"author", a.author},
         {"timestamp", a.timestamp}};
}
inline void from_json(const json& j, CompatibilityAnnotation& a) {
    a.item_id = j.value("item_id", "");
    a.basis = j.at("basis").get<Basis>();
    a.rationale = j.value("rationale", "");
    a.author = j.value("author", "");
    a.timestamp = j.value("timestamp", "");
}

inline void to_json(json& j, const ClassificationHistoryEntry& h) {
    j = {{"tier", h.tier}, {"basis", h.basis}, {"adjudication", h.adjudication}};
}
inline void from_json(const json& j, ClassificationHistoryEntry& h) {
    h.tier = j.at("tier").get<Tier>();
    h.basis = j.at("basis").get<CompatibilityAnnotation>();
    h.adjudication = j.at("adjudication").get<CompatibilityAnnotation>();
}

inline void to_json(json& j, const ConsensusClassification& c) {
    j = {{"item_id", c.item_id},
         {"tier", c.tier},
         {"agreement", c.agreement},
         {"basis", c.basis},
         {"history", c.history}};
}
inline void from_json(const json& j, ConsensusClassification& c) {
    c.item_id = j.at("item_id").get<std::string>();
    c.tier = j.at("tier").get<Tier>();
    c.agreement = j.at("agreement").get<AgreementSummary>();
    c.basis = j.at("basis").get<CompatibilityAnnotation>();
    c.history = j.value("history", std::vector<ClassificationHistoryEntry>{});
}

inline json tally_json(const TierTally& t) {
    json tiers = json::object();
    for (auto tier : kAllTiers) {
        tiers[std::string(enum_name(tier))] = {{"count", t.count(tier)}, {"percent", t.percent(tier)}};
    }
    return {{"classified", t.classified},
            {"tiers", tiers},
            {"consensus", t.consensus()},
            {"consensus_rate", t.consensus_rate()}};
}

inline void to_json(json& j, const CodingRecord& r) {
    j = {{"response_id", r.response_id}, {"codes", r.codes}, {"coder", r.coder}, {"timestamp", r.timestamp}};
    detail::put_opt(j, "note", r.note);
}
inline void from_json(const json& j, CodingRecord& r) {
    r.response_id = j.at("response_id").get<std::string>();
    r.codes = j.at("codes").get<ReasoningCodeSet>();
    r.coder = j.value("coder", "");
    r.timestamp = j.value("timestamp", "");
    r.note = detail::get_opt<std::string>(j, "note");
}

inline json profile_json(const ReasoningProfile& p) {
    json cats = json::object();
    for (auto c : kAllCategories) {
        const auto i = static_cast<std::size_t>(c);
        json by_section = json::object();
        for (std::size_t s = 0; s < p.section_ids.size(); ++s) by_section[p.section_ids[s]] = p.by_section[i][s];
        cats[std::string(to_string(c))] = {
            {"present", p.presence[i]}, {"frequency", p.frequency[i]}, {"by_section", by_section}};
    }
    return {{"subject", p.subject}, {"responses", p.responses}, {"categories", cats}};
}

inline void to_json(json& j, const PanelStance& s) {
    j = {{"band", s.band}, {"majority_fraction", s.majority_fraction}, {"code_union", s.code_union}};
}

inline void to_json(json& j, const AlignmentOverride& o) {
    j = {{"item_id", o.item_id},     {"category", o.category}, {"prior", o.prior},
         {"rationale", o.rationale}, {"author", o.author},     {"timestamp", o.timestamp}};
}
inline void from_json(const json& j, AlignmentOverride& o) {
    o.item_id = j.value("item_id", "");
    o.category = j.at("category").get<AlignmentCategory>();
    o.prior = j.contains("prior") ? j.at("prior").get<AlignmentCategory>() : AlignmentCategory::fully_aligned;
    o.rationale = j.value("rationale", "");
    o.author = j.value("author", "");
    o.timestamp = j.value("timestamp", "");
}

inline void to_json(json& j, const AlignmentRecord& r) {
    j = {{"item_id", r.item_id}, {"category", r.category}, {"automatic", r.automatic},
         {"ai_band", r.ai_band}, {"panel", r.panel},       {"overlap", r.overlap}};
    detail::put_opt(j, "facilitator_override", r.facilitator_override);
}

inline json alignment_json(const AlignmentTally& t) {
    json counts = json::object();
    json automatic = json::object();
    for (auto c : {AlignmentCategory::fully_aligned, AlignmentCategory::partially_aligned, AlignmentCategory::divergent}) {
        counts[std::string(enum_name(c))] = t.count(c);
        automatic[std::string(enum_name(c))] = t.automatic(c);
    }
    return {{"schema_version", kSchemaVersion},
            {"total", t.total()},
            {"counts", counts},
            {"automatic_counts", automatic},
            {"band_concordance", t.concordance()},
            {"band_concordance_percent", format_percent(static_cast<std::int64_t>(t.concordant()),
                                                        static_cast<std::int64_t>(t.total()))},
            {"records", t.records}};
}

inline json saturation_json(const SaturationReport& r) {
    json steps = json::array();
    for (std::size_t k = 1; k <= r.canonical.steps.size(); ++k) {
        steps.push_back({{"prefix_k", k}, {"pairs_covered", r.canonical.steps[k - 1].size()}});
    }
    json histogram = json::object();
    for (const auto& [k, n] : index_histogram(r)) histogram[std::to_string(k)] = n;
    json evaluated = r.evaluated.kind == RobustnessMode::Kind::exhaustive
                         ? json{{"mode", "exhaustive"}}
                         : json{{"mode", "sampled"}, {"count", r.evaluated.count}, {"seed", *r.evaluated.seed}};
    return {{"schema_version", kSchemaVersion},
            {"role", r.role},
            {"panel_size", r.panel_size},
            {"ordering", r.canonical.ordering},
            {"saturation_index", r.saturation_index ? json(*r.saturation_index) : json(nullptr)},
            {"required", r.canonical.required.size()},
            {"category_complete", r.canonical.category_complete},
            {"curve", steps},
            {"max_index", r.max_index},
            {"robust", r.robust},
            {"evaluated", evaluated},
            {"index_histogram", histogram},
            {"per_ordering_indices", r.per_ordering_indices}};
}

inline void to_json(json& j, const ProvenanceLog& p) {
    j = {{"item_id", p.item_id},   {"panelist_id", p.panelist_id},   {"adapter", p.adapter},
         {"protocol", p.protocol}, {"request", p.request},           {"raw_response", p.raw_response},
         {"cited", p.cited},       {"admitted", p.admitted},         {"timestamp", p.timestamp},
         {"outcome", p.outcome},   {"detail", p.detail}};
}
inline void from_json(const json& j, ProvenanceLog& p) {
    p.item_id = j.at("item_id").get<std::string>();
    p.panelist_id = j.at("panelist_id").get<std::string>();
    p.adapter = j.value("adapter", "");
    p.protocol = j.value("protocol", "");
    p.request = j.at("request").get<std::string>();
    p.raw_response = j.at("raw_response").get<std::string>();
    p.cited = j.value("cited", std::vector<std::string>{});
    p.admitted = j.value("admitted", std::vector<std::string>{});
    p.timestamp = j.value("timestamp", "");
    p.outcome = j.value("outcome", "");
    p.detail = j.value("detail", "");
}

inline void to_json(json& j, const AdmissionDecision& d) {
    j = {{"source_id", d.source_id}, {"admitted", d.admitted}, {"reason", d.reason}};
    detail::put_opt(j, "trust_level", d.trust_level);
}

}  // namespace delphi
