#pragma once

// Study fixtures shared by the unit, integration and acceptance tests.
// Each fixture is a plan: a draft study plus the scripted inputs a
// facilitator would supply. A plan can be driven through StudySession
// (full audit trail) or materialized directly as a coded Study for the
// pure analysis functions.

#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "delphi/delphi.hpp"

namespace fixtures {

using namespace delphi;

inline ReasoningCodeSet codes(std::initializer_list<Category> cs) {
    ReasoningCodeSet s;
    for (auto c : cs) s.insert(c);
    return s;
}

constexpr Category CG = Category::conditional_general;
constexpr Category CP = Category::conditional_population;
constexpr Category CT = Category::conditional_temporal;
constexpr Category EB = Category::evidence_based;
constexpr Category EX = Category::experiential;
constexpr Category PR = Category::pragmatic;
constexpr Category PB = Category::principle_based;

struct Annotation {
    Basis basis = Basis::shared;
    std::string rationale;
};

struct Clarification {
    std::string item_id;
    std::string panelist_id;
    std::string question;
    std::string answer;
};

struct Override {
    std::string item_id;
    AlignmentCategory category;
    std::string rationale;
};

struct Plan {
    Study study;  // draft, no responses
    std::vector<IngestRow> rows;
    std::map<std::string, ReasoningCodeSet> coding;  // response id -> codes, AI included
    std::string ai_panelist;
    std::map<std::string, AiAnswer> ai_answers;  // item id -> answer
    std::map<std::string, Annotation> annotations;  // recorded before classification
    std::map<std::string, std::string> reclassifications;  // item id -> rationale
    std::vector<std::string> novelty;  // response ids
    std::vector<Clarification> clarifications;
    std::vector<Override> overrides;
};

enum class Stage { collected, coded, adjudicating, classified, reported };

inline std::string facilitator = "facilitator";

inline std::string pad(int n, int width) {
    std::string s = std::to_string(n);
    return std::string(width > static_cast<int>(s.size()) ? width - s.size() : 0, '0') + s;
}

inline IngestRow row(const std::string& panelist, const std::string& item, int rating) {
    IngestRow r;
    r.panelist_id = panelist;
    r.item_id = item;
    r.rating = rating;
    r.justification = "Rationale from " + panelist + " on " + item + ".";
    return r;
}

inline Response response(const std::string& item, const std::string& panelist, int rating,
                         ReasoningCodeSet cs = {}) {
    Response r;
    r.item_id = item;
    r.panelist_id = panelist;
    r.rating = rating;
    r.justification = "Rationale from " + panelist + ".";
    r.codes = cs;
    return r;
}

/// Responses for one item from panelists P1..Pn.
inline std::vector<Response> rated(const std::string& item, const std::vector<int>& ratings) {
    std::vector<Response> out;
    for (std::size_t i = 0; i < ratings.size(); ++i) out.push_back(response(item, "P" + std::to_string(i + 1), ratings[i]));
    return out;
}

inline Panelist panelist(const std::string& id, Role role) { return {id, role, id}; }

inline std::vector<IngestRow> rows_of(const Plan& plan, const std::string& panelist_id) {
    std::vector<IngestRow> out;
    for (const auto& r : plan.rows) {
        if (r.panelist_id == panelist_id) out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phase II comparison: 20 Likert items, six senior experts, one AI respondent.

inline CorpusSpec phase2_corpus() {
    CorpusSpec spec;
    spec.cutoff_date = CalendarDate::parse("2023-06");
    spec.sources = {
        {"guideline-a", "National sleep guideline", SourceCategory::public_guideline, "2021-05", Access::public_access, 1, {}},
        {"review-b", "Open-access systematic review", SourceCategory::open_access_literature, "2022-11", Access::public_access, 2, {}},
        {"agency-c", "Public health agency report", SourceCategory::agency_report, "2020-02", Access::public_access, 3, {}},
        {"trial-d", "Trial published after convening", SourceCategory::open_access_literature, "2023-10", Access::public_access, 2, {}},
    };
    return with_trust_levels(spec);
}

/// Senior agreement per item: ratings for E1..E6.
inline std::vector<int> phase2_ratings(int item) {
    switch (item) {
        case 3: case 6: case 8: case 16: case 17: case 19:
            return {5, 4, 4, 3, 4, 5};  // 5 of 6 in 4-5
        case 10:
            return {4, 4, 4, 3, 3, 2};  // below 75% in 4-5
        default:
            return {5, 5, 4, 5, 4, 5};
    }
}

inline int phase2_ai_rating(int item) {
    switch (item) {
        case 3: case 6: case 8: case 16: case 17: case 19: return 4;
        case 10: return 3;
        default: return 5;
    }
}

/// Themes the senior panel uses on each item.
inline ReasoningCodeSet phase2_themes(int item) {
    if (item <= 3) return codes({EB, CG, EX});
    if (item <= 5) return codes({EB, PR});
    if (item <= 7) return codes({EB, CP, PB});
    if (item == 8) return codes({EB, CT, CG});
    if (item == 9) return codes({EB, PB});
    if (item == 10) return codes({EB, CP, CT});
    if (item == 11) return codes({EB, CG});
    if (item <= 15) return codes({EB, CG, PR});
    if (item <= 17) return codes({EB, EX});
    if (item <= 19) return codes({CG, EB});
    return codes({EB, CG, CT});
}

inline ReasoningCodeSet phase2_ai_codes(int item) {
    if (item <= 3) return codes({EB, CG});
    if (item <= 5) return codes({EB});
    if (item <= 7) return codes({EB, CP});
    if (item == 8) return codes({EB, CG});
    if (item == 9) return codes({EB, PB});
    if (item == 10) return codes({EB, CP});
    if (item == 11) return codes({EB});
    if (item <= 15) return codes({EB, CG});
    if (item <= 17) return codes({EB});
    if (item <= 19) return codes({CG, EB});
    return codes({EB, CG});
}

/// Senior codes. E1-E3 do not invoke principle-based reasoning, so the
/// seventh category first appears with E4. On item 20 only E5 and E6 add
/// the temporal qualifier; in the adversarial variant only E6 does.
inline ReasoningCodeSet phase2_senior_codes(int item, int expert, bool adversarial) {
    ReasoningCodeSet set = phase2_themes(item);
    if (item == 20) {
        const bool temporal = adversarial ? expert == 6 : expert >= 5;
        return temporal ? codes({EB, CG, CT}) : codes({EB, CG});
    }
    if (expert <= 3 && set.contains(PB)) {
        ReasoningCodeSet trimmed;
        for (auto c : set.categories()) {
            if (c != PB) trimmed.insert(c);
        }
        if (trimmed.empty()) trimmed.insert(EB);
        return trimmed;
    }
    return set;
}

inline std::string phase2_item(int i) { return "q" + pad(i, 2); }

inline Plan phase2_plan(bool adversarial = false) {
    Plan plan;
    Study& s = plan.study;
    s.id = adversarial ? "phase2-adversarial" : "phase2";
    s.title = "Primary care insomnia comparison";
    s.sections = {{"s1", "Assessment"}, {"s2", "Treatment"}, {"s3", "Education and follow-up"}};
    for (int i = 1; i <= 20; ++i) {
        const std::string section = i <= 5 ? "s1" : i <= 11 ? "s2" : "s3";
        s.items.push_back({phase2_item(i), section, "Practice statement " + pad(i, 2), ItemKind::fixed,
                           ItemOrigin::a_priori, ResponseFormat::likert, false, std::nullopt});
    }
    for (int e = 1; e <= 6; ++e) s.panel.push_back(panelist("E" + std::to_string(e), Role::senior_expert));
    s.panel.push_back(panelist("AI", Role::ai_respondent));
    s.corpus = phase2_corpus();
    plan.ai_panelist = "AI";

    for (int i = 1; i <= 20; ++i) {
        const auto ratings = phase2_ratings(i);
        for (int e = 1; e <= 6; ++e) {
            const std::string pid = "E" + std::to_string(e);
            plan.rows.push_back(row(pid, phase2_item(i), ratings[static_cast<std::size_t>(e - 1)]));
            plan.coding[response_id(phase2_item(i), pid)] = phase2_senior_codes(i, e, adversarial);
        }
        AiAnswer a;
        a.rating = phase2_ai_rating(i);
        a.justification = "Corpus-grounded rationale for " + phase2_item(i) + ".";
        a.cited = {i % 2 ? "guideline-a" : "review-b"};
        plan.ai_answers[phase2_item(i)] = a;
        plan.coding[response_id(phase2_item(i), "AI")] = phase2_ai_codes(i);
    }
    plan.novelty = {response_id("q20", "E5")};
    plan.clarifications = {{"q10", "E6", "Which patient groups does your disagreement apply to?",
                            "Only where sedative burden is already high."}};
    plan.overrides = {{"q08", AlignmentCategory::partially_aligned,
                       "AI rationale omits the timing qualifier the panel relied on."}};
    return plan;
}

// ---------------------------------------------------------------------------
// Strength guidance: 159 items over 10 sections, six seniors, eight
// less-experienced practitioners and one AI respondent. Senior tiers are
// 60 strong, 94 conditional, 5 operational.

enum class StrengthKind { strong, operational, mixed_annotated, mixed_reclassified, positive_annotated, positive_reclassified };

inline constexpr int kStrengthItems = 159;
inline constexpr int kStrengthLE = 8;

/// Kind by a fixed permutation of the item index so tiers interleave across sections.
inline StrengthKind strength_kind(int i) {
    const int p = (i * 7) % kStrengthItems;
    if (p < 60) return StrengthKind::strong;
    if (p < 65) return StrengthKind::operational;
    if (p < 80) return StrengthKind::mixed_annotated;
    if (p < 95) return StrengthKind::mixed_reclassified;
    if (p < 139) return StrengthKind::positive_annotated;
    return StrengthKind::positive_reclassified;
}

inline bool strength_mixed(StrengthKind k) {
    return k == StrengthKind::mixed_annotated || k == StrengthKind::mixed_reclassified;
}

inline std::vector<int> strength_senior_ratings(StrengthKind k, int i) {
    switch (k) {
        case StrengthKind::strong: return i % 2 ? std::vector<int>{5, 5, 4, 5, 4, 4} : std::vector<int>{5, 4, 4, 5, 4, 3};
        case StrengthKind::operational: return {5, 4, 4, 4, 3, 3};
        case StrengthKind::mixed_annotated:
        case StrengthKind::mixed_reclassified: return {5, 4, 3, 3, 2, 2};
        case StrengthKind::positive_annotated: return {5, 5, 4, 4, 3, 2};
        case StrengthKind::positive_reclassified: return {5, 4, 4, 3, 3, 2};
    }
    return {};
}

inline std::string strength_item(int i) { return "st" + pad(i + 1, 3); }

inline Plan strength_plan() {
    Plan plan;
    Study& s = plan.study;
    s.id = "strength";
    s.title = "Strength training guidance";
    for (int k = 1; k <= 10; ++k) s.sections.push_back({"sec" + pad(k, 2), "Theme " + pad(k, 2)});
    for (int i = 0; i < kStrengthItems; ++i) {
        s.items.push_back({strength_item(i), "sec" + pad(i / 16 + 1, 2), "Guidance statement " + pad(i + 1, 3),
                           ItemKind::fixed, ItemOrigin::a_priori, ResponseFormat::likert, false, std::nullopt});
    }
    for (int e = 1; e <= 6; ++e) s.panel.push_back(panelist("E" + std::to_string(e), Role::senior_expert));
    for (int l = 1; l <= kStrengthLE; ++l) s.panel.push_back(panelist("L" + std::to_string(l), Role::less_experienced));
    s.panel.push_back(panelist("AI", Role::ai_respondent));
    CorpusSpec spec;
    spec.cutoff_date = CalendarDate::parse("2023-03");
    spec.sources = {{"position-1", "Open position stand", SourceCategory::public_guideline, "2021-01", Access::public_access, 1, {}},
                    {"meta-2", "Open meta-analysis", SourceCategory::open_access_literature, "2022-06", Access::public_access, 2, {}}};
    s.corpus = with_trust_levels(spec);
    plan.ai_panelist = "AI";

    // Less-experienced ratings on positive-stance items: 647 positive,
    // 303 neutral, 82 negative over 1032 responses, spread by a coprime stride.
    constexpr int kPositiveSlots = 1032;
    int slot = 0;
    int ai_divergent = 0;
    for (int i = 0; i < kStrengthItems; ++i) {
        const auto id = strength_item(i);
        const auto kind = strength_kind(i);
        const auto ratings = strength_senior_ratings(kind, i);
        for (int e = 1; e <= 6; ++e) {
            const std::string pid = "E" + std::to_string(e);
            plan.rows.push_back(row(pid, id, ratings[static_cast<std::size_t>(e - 1)]));
            ReasoningCodeSet cs = codes({EB});
            if (e % 2 == 0) cs.insert(EX);
            if (strength_mixed(kind)) cs.insert(e <= 3 ? CP : CT);
            if ((i + e) % 5 == 0) cs.insert(PR);
            if ((i + e) % 7 == 0) cs.insert(PB);
            if ((i + e) % 11 == 0) cs.insert(CG);
            plan.coding[response_id(id, pid)] = cs;
        }
        for (int l = 1; l <= kStrengthLE; ++l) {
            const std::string pid = "L" + std::to_string(l);
            int rating = 0;
            if (strength_mixed(kind)) {
                rating = l <= 6 ? 3 : 2;
            } else {
                const int p = (slot++ * 389) % kPositiveSlots;
                rating = p < 647 ? 4 + p % 2 : p < 950 ? 3 : 2 - p % 2;
            }
            plan.rows.push_back(row(pid, id, rating));
            plan.coding[response_id(id, pid)] = l % 3 == 0 ? codes({PR}) : l % 3 == 1 ? codes({EX}) : codes({EX, PR});
        }
        AiAnswer a;
        if (strength_mixed(kind)) {
            a.rating = 3;
        } else if (kind == StrengthKind::strong && ai_divergent < 4) {
            a.rating = 2;
            ++ai_divergent;
        } else {
            a.rating = 4 + i % 2;
        }
        a.justification = "Evidence summary for " + id + ".";
        a.cited = {"meta-2"};
        plan.ai_answers[id] = a;
        plan.coding[response_id(id, "AI")] = codes({EB});

        switch (kind) {
            case StrengthKind::operational:
                if (i % 2) plan.annotations[id] = {Basis::minor_reservations, "Dissent limited to dosing detail."};
                break;
            case StrengthKind::mixed_annotated:
            case StrengthKind::positive_annotated:
                plan.annotations[id] = {Basis::conditionally_reconciled, "Agreement holds once training status is specified."};
                break;
            case StrengthKind::mixed_reclassified:
            case StrengthKind::positive_reclassified:
                plan.reclassifications[id] = "Clarification showed the dissent was conditional on athlete age.";
                break;
            case StrengthKind::strong:
                break;
        }
    }
    plan.clarifications = {{strength_item(1), "E6", "Does your rating depend on training age?", "Yes, novices only."}};
    return plan;
}

// ---------------------------------------------------------------------------
// Endurance guidance: 143 fixed items in 13 sections (132 consensus, 11
// divergent), one "Other" slot per section and 36 participant proposals.

inline constexpr int kEnduranceItems = 143;

enum class EnduranceKind { strong, conditional, operational, irreconcilable, low_agreement };

inline EnduranceKind endurance_kind(int i) {
    const int p = (i * 5) % kEnduranceItems;
    if (p < 74) return EnduranceKind::strong;
    if (p < 124) return EnduranceKind::conditional;
    if (p < 132) return EnduranceKind::operational;
    if (p < 138) return EnduranceKind::irreconcilable;
    return EnduranceKind::low_agreement;
}

inline std::string endurance_item(int i) { return "en" + pad(i + 1, 3); }
inline std::string endurance_slot(int k) { return "en-other-" + pad(k + 1, 2); }

inline Plan endurance_plan() {
    Plan plan;
    Study& s = plan.study;
    s.id = "endurance";
    s.title = "Endurance running guidance";
    for (int k = 0; k < 13; ++k) s.sections.push_back({"run" + pad(k + 1, 2), "Domain " + pad(k + 1, 2)});
    for (int i = 0; i < kEnduranceItems; ++i) {
        s.items.push_back({endurance_item(i), "run" + pad(i / 11 + 1, 2), "Running principle " + pad(i + 1, 3),
                           ItemKind::fixed, ItemOrigin::a_priori, ResponseFormat::likert, false, std::nullopt});
    }
    for (int k = 0; k < 13; ++k) {
        s.items.push_back({endurance_slot(k), "run" + pad(k + 1, 2), "Other (please specify)", ItemKind::other_slot,
                           ItemOrigin::a_priori, ResponseFormat::likert, false, std::nullopt});
    }
    for (int e = 1; e <= 6; ++e) s.panel.push_back(panelist("E" + std::to_string(e), Role::senior_expert));

    for (int i = 0; i < kEnduranceItems; ++i) {
        const auto id = endurance_item(i);
        const auto kind = endurance_kind(i);
        std::vector<int> ratings;
        switch (kind) {
            case EnduranceKind::strong: ratings = {5, 5, 4, 4, 5, 4}; break;
            case EnduranceKind::conditional: ratings = {5, 4, 3, 3, 4, 2}; break;
            case EnduranceKind::operational: ratings = {4, 4, 5, 4, 3, 2}; break;
            case EnduranceKind::irreconcilable: ratings = {5, 4, 3, 2, 2, 1}; break;
            case EnduranceKind::low_agreement: ratings = {4, 4, 4, 3, 2, 2}; break;
        }
        for (int e = 1; e <= 6; ++e) {
            const std::string pid = "E" + std::to_string(e);
            plan.rows.push_back(row(pid, id, ratings[static_cast<std::size_t>(e - 1)]));
            plan.coding[response_id(id, pid)] = e % 2 ? codes({EB, CG}) : codes({EX});
        }
        if (kind == EnduranceKind::conditional) {
            plan.annotations[id] = {Basis::conditionally_reconciled, "Reconciled by event distance."};
        } else if (kind == EnduranceKind::irreconcilable) {
            plan.annotations[id] = {Basis::irreconcilable, "Panel split on the underlying principle."};
        }
    }
    // Six proposals per senior, each on a different slot.
    for (int e = 1; e <= 6; ++e) {
        const std::string pid = "E" + std::to_string(e);
        for (int m = 0; m < 6; ++m) {
            const int k = (e - 1 + 2 * m) % 13;
            auto r = row(pid, endurance_slot(k), 4);
            r.proposed_statement = "Proposal by " + pid + " for domain " + pad(k + 1, 2);
            plan.rows.push_back(r);
            plan.coding[response_id(proposal_item_id(endurance_slot(k), pid), pid)] = codes({EX});
        }
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Twelve-source corpus with the decision each source must receive.

struct ExpectedAdmission {
    SourceRecord source;
    bool admitted;
    std::string reason;
};

inline std::vector<ExpectedAdmission> mixed_corpus_table() {
    const auto pub = Access::public_access;
    return {
        {{"guideline-l1", "National guideline", SourceCategory::public_guideline, "2022-01", pub, 1, {}}, true, ""},
        {{"oa-at-cutoff", "Open trial", SourceCategory::open_access_literature, "2023-06", pub, 2, {}}, true, ""},
        {{"oa-late", "Later open trial", SourceCategory::open_access_literature, "2023-07", pub, 2, {}}, false, "post-cutoff"},
        {{"paywalled", "Journal article", SourceCategory::paywalled_article, "2020-04", Access::restricted, 2, {}}, false, "excluded access class"},
        {{"paywalled-late", "Late journal article", SourceCategory::paywalled_article, "2024-01", Access::restricted, 2, {}}, false, "post-cutoff"},
        {{"restricted-guideline", "Members-only guideline", SourceCategory::public_guideline, "2021-03", Access::restricted, 1, {}}, false, "excluded access class"},
        {{"textbook", "Commercial textbook", SourceCategory::commercial_textbook, "2019-09", pub, 3, {}}, false, "excluded category"},
        {{"social", "Social media thread", SourceCategory::social_media, "2022-02", pub, 4, {}}, false, "excluded category"},
        {{"blog", "Personal blog", SourceCategory::personal_blog, "2022-02", pub, 4, {}}, false, "excluded category"},
        {{"vetted-site", "Professional body site", SourceCategory::vetted_website, "2022-08", pub, 3, std::string("checked by facilitator")}, true, ""},
        {{"grey-unvetted", "Conference handout", SourceCategory::grey_literature, "2022-05", pub, 4, {}}, false, "unvetted grey literature"},
        {{"agency", "Agency report", SourceCategory::agency_report, "2021-11", pub, 3, {}}, true, ""},
    };
}

inline CorpusSpec mixed_corpus() {
    CorpusSpec spec;
    spec.cutoff_date = CalendarDate::parse("2023-06");
    for (const auto& row : mixed_corpus_table()) spec.sources.push_back(row.source);
    spec.vetting = {{"vetted-site", "facilitator", "content reviewed"}};
    return with_trust_levels(spec);
}

// ---------------------------------------------------------------------------
// Drivers.

inline json response_doc(const Plan& plan, const std::vector<std::string>& panelists) {
    std::vector<IngestRow> rows;
    for (const auto& p : panelists) {
        auto part = rows_of(plan, p);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return response_document(rows);
}

inline std::vector<std::string> human_panelists(const Plan& plan) {
    std::vector<std::string> out;
    for (const auto& p : plan.study.panel) {
        if (p.role != Role::ai_respondent) out.push_back(p.id);
    }
    return out;
}

inline MockAdapter mock_for(const Plan& plan) {
    MockAdapter m;
    for (const auto& [item, a] : plan.ai_answers) m.set(item, a);
    return m;
}

/// Runs the plan through the orchestrator up to `stop`.
inline StudySession run_plan(const Plan& plan, Stage stop = Stage::reported,
                             std::optional<std::filesystem::path> dir = std::nullopt) {
    auto session = StudySession::create(plan.study, facilitator, stepping_clock(), dir);
    session.transition(WorkflowEvent::finalize_items, facilitator);
    session.transition(WorkflowEvent::open_collection, facilitator);
    // One document per panelist, as submissions would arrive.
    for (const auto& pid : human_panelists(plan)) session.ingest_responses(response_doc(plan, {pid}), pid);
    if (!plan.ai_answers.empty()) {
        auto mock = mock_for(plan);
        session.collect_ai(mock, plan.ai_panelist, facilitator);
    }
    if (stop == Stage::collected) return session;

    session.transition(WorkflowEvent::close_collection, facilitator);
    for (const auto& r : session.study().responses) {
        const auto rid = response_id(r);
        if (auto it = plan.coding.find(rid); it != plan.coding.end()) session.code_response(rid, it->second, facilitator);
    }
    for (const auto& rid : plan.novelty) session.flag_novelty(rid, true, facilitator);
    for (const auto& c : plan.clarifications) {
        session.request_clarification(c.item_id, c.panelist_id, c.question, facilitator);
        session.record_answer(c.item_id, c.panelist_id, c.answer, c.panelist_id);
    }
    if (stop == Stage::coded) return session;

    session.transition(WorkflowEvent::begin_adjudication, facilitator);
    for (const auto& [item, a] : plan.annotations) session.adjudicate(item, a.basis, a.rationale, facilitator);
    if (stop == Stage::adjudicating) return session;

    session.classify_all(facilitator);
    for (const auto& [item, why] : plan.reclassifications) {
        session.adjudicate(item, Basis::conditionally_reconciled, why, facilitator);
    }
    for (const auto& o : plan.overrides) session.override_alignment(o.item_id, o.category, o.rationale, facilitator);
    session.transition(WorkflowEvent::complete_classification, facilitator);
    if (stop == Stage::classified) return session;

    session.emit_report(facilitator);
    session.save_snapshot();
    return session;
}

/// The plan's responses, codes and novelty flags applied directly to the study.
inline Study coded_study(const Plan& plan) {
    Study s = plan.study;
    for (auto& item : s.items) item.finalized = true;
    for (const auto& r : plan.rows) {
        Response resp;
        resp.item_id = r.proposed_statement ? proposal_item_id(r.item_id, r.panelist_id) : r.item_id;
        resp.panelist_id = r.panelist_id;
        resp.rating = r.rating;
        resp.justification = r.justification;
        if (r.proposed_statement) {
            const Item* slot = s.find_item(r.item_id);
            s.items.push_back({resp.item_id, slot->section_id, *r.proposed_statement, ItemKind::other_slot,
                               ItemOrigin::participant_proposed, slot->format, true, r.panelist_id});
        }
        s.responses.push_back(resp);
    }
    for (const auto& [item, a] : plan.ai_answers) {
        if (!a.rating) continue;
        Response resp;
        resp.item_id = item;
        resp.panelist_id = plan.ai_panelist;
        resp.rating = *a.rating;
        resp.justification = a.justification;
        s.responses.push_back(resp);
    }
    for (auto& r : s.responses) {
        if (auto it = plan.coding.find(response_id(r)); it != plan.coding.end()) r.codes = it->second;
    }
    for (const auto& rid : plan.novelty) {
        for (auto& r : s.responses) {
            if (response_id(r) == rid) r.novelty_flag = true;
        }
    }
    return s;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("delphi-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace fixtures
