#include <gtest/gtest.h>

#include "delphi/delphi.hpp"
#include "support/fixtures.hpp"

using namespace delphi;
using namespace fixtures;

namespace {

Item finalized_item(const std::string& id, ResponseFormat f = ResponseFormat::likert) {
    return {id, "s1", "Statement for " + id, ItemKind::fixed, ItemOrigin::a_priori, f, true, std::nullopt};
}

std::string expect_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "no error";
}

}  // namespace

TEST(Cutoff, ConveningDateWins) {
    EXPECT_EQ(resolve_cutoff({StudyType::panel, CalendarDate::parse("2022-10"), CalendarDate::parse("2024-03")})
                  .to_string(),
              "2022-10");
}

TEST(Cutoff, PublicationMinusNineMonths) {
    EXPECT_EQ(resolve_cutoff({StudyType::panel, std::nullopt, CalendarDate::parse("2024-03")}).to_string(), "2023-06");
}

TEST(Cutoff, SystematicReviewUsesPublication) {
    EXPECT_EQ(resolve_cutoff({StudyType::systematic_review, std::nullopt, CalendarDate::parse("2021-01")}).to_string(),
              "2021-01");
    EXPECT_EQ(expect_code([] { resolve_cutoff({StudyType::panel, std::nullopt, std::nullopt}); }),
              "cutoff unresolvable");
}

TEST(Admission, MixedTable) {
    const auto spec = mixed_corpus();
    for (const auto& row : mixed_corpus_table()) {
        const auto d = admit_source(spec, row.source);
        EXPECT_EQ(d.admitted, row.admitted) << row.source.id;
        EXPECT_EQ(d.reason, row.reason) << row.source.id;
        if (d.admitted) {
            EXPECT_EQ(d.trust_level, row.source.trust_level);
            EXPECT_EQ(spec.trust_levels.at(row.source.id), row.source.trust_level);
        }
    }
}

TEST(Admission, CategoryNotAdmitted) {
    CorpusSpec spec;
    spec.cutoff_date = CalendarDate::parse("2023-06");
    spec.categories = {SourceCategory::public_guideline};
    const SourceRecord agency{"agency", "Agency", SourceCategory::agency_report, "2021-01", Access::public_access, 2, {}};
    EXPECT_EQ(admit_source(spec, agency).reason, "category not admitted");
}

TEST(Admission, InvalidRecords) {
    CorpusSpec spec;
    spec.cutoff_date = CalendarDate::parse("2023-06");
    SourceRecord s{"x", "X", SourceCategory::public_guideline, "2021/01", Access::public_access, 1, {}};
    EXPECT_EQ(expect_code([&] { admit_source(spec, s); }), "invalid source record");
    s.publication_date = "2021-01";
    s.trust_level = 5;
    EXPECT_EQ(expect_code([&] { admit_source(spec, s); }), "invalid source record");
    s.trust_level = 3;
    s.category = SourceCategory::vetted_website;
    EXPECT_EQ(expect_code([&] { admit_source(spec, s); }), "invalid source record");
}

TEST(Admission, IndependentOfOtherSources) {
    const auto full = mixed_corpus();
    for (const auto& row : mixed_corpus_table()) {
        CorpusSpec alone = full;
        alone.sources = {row.source};
        EXPECT_EQ(admit_source(alone, row.source), admit_source(full, row.source)) << row.source.id;
    }
}

TEST(Prompt, LikertListsOnlyAdmittedSources) {
    const auto spec = mixed_corpus();
    const auto p = build_prompt(finalized_item("q01"), spec, ResponseFormat::likert);
    EXPECT_NE(p.text.find("rating: <integer 1-5"), std::string::npos);
    EXPECT_NE(p.text.find("justification:"), std::string::npos);
    EXPECT_EQ(p.admitted_source_ids,
              (std::vector<std::string>{"guideline-l1", "oa-at-cutoff", "agency", "vetted-site"}));
    for (const auto& row : mixed_corpus_table()) {
        if (!row.admitted) {
            EXPECT_EQ(p.text.find("- " + row.source.id + " "), std::string::npos) << row.source.id;
        }
    }
}

TEST(Prompt, BinaryAndUnfinalized) {
    const auto spec = mixed_corpus();
    const auto p = build_prompt(finalized_item("q02", ResponseFormat::binary), spec, ResponseFormat::binary);
    EXPECT_NE(p.text.find("decision: <yes|no>"), std::string::npos);
    auto draft = finalized_item("q03");
    draft.finalized = false;
    EXPECT_EQ(expect_code([&] { build_prompt(draft, spec, ResponseFormat::likert); }), "item not finalized");
}

TEST(Prompt, Deterministic) {
    const auto spec = mixed_corpus();
    EXPECT_EQ(build_prompt(finalized_item("q01"), spec, ResponseFormat::likert).text,
              build_prompt(finalized_item("q01"), spec, ResponseFormat::likert).text);
}

TEST(AiRespond, PhaseTwoMockGivesTwentyResponses) {
    const auto plan = phase2_plan();
    auto mock = mock_for(plan);
    std::size_t parsed = 0;
    for (auto item : plan.study.items) {
        item.finalized = true;
        const auto result = ai_respond(mock, build_prompt(item, *plan.study.corpus, item.format), "AI", "t");
        ASSERT_TRUE(result.response.has_value());
        EXPECT_EQ(result.response->rating, phase2_ai_rating(std::stoi(item.id.substr(1))));
        EXPECT_EQ(result.log.outcome, "ingested");
        ++parsed;
    }
    EXPECT_EQ(parsed, 20u);
}

TEST(AiRespond, OutOfRangeRatingIsMalformed) {
    const auto spec = phase2_corpus();
    MockAdapter mock;
    mock.set("q01", "protocol: " + protocol_tag() + "\nrating: 7\njustification: sure\nsources: guideline-a\n");
    try {
        ai_respond(mock, build_prompt(finalized_item("q01"), spec, ResponseFormat::likert), "AI", "t");
        FAIL();
    } catch (const AiExchangeError& e) {
        EXPECT_EQ(e.code(), "malformed AI response");
        EXPECT_EQ(e.log().outcome, "malformed");
    }
}

TEST(AiRespond, PostCutoffCitationIsQuarantined) {
    const auto spec = phase2_corpus();
    MockAdapter mock;
    AiAnswer a;
    a.rating = 4;
    a.justification = "New trial says so.";
    a.cited = {"guideline-a", "trial-d"};
    mock.set("q01", a);
    try {
        ai_respond(mock, build_prompt(finalized_item("q01"), spec, ResponseFormat::likert), "AI", "t");
        FAIL();
    } catch (const AiExchangeError& e) {
        EXPECT_EQ(e.code(), "corpus violation");
        EXPECT_EQ(e.log().outcome, "quarantined");
        EXPECT_EQ(e.log().cited, (std::vector<std::string>{"guideline-a", "trial-d"}));
    }
}

TEST(AiRespond, ProtocolLineRequired) {
    EXPECT_EQ(expect_code([] { parse_ai_output("rating: 4\njustification: x\n", ResponseFormat::likert); }),
              "malformed AI response");
    EXPECT_EQ(expect_code([] {
                  parse_ai_output("protocol: " + protocol_tag() + "\nrating: 4\njustification:\n", ResponseFormat::likert);
              }),
              "malformed AI response");
    const auto b = parse_ai_output("protocol: " + protocol_tag() + "\ndecision: no\njustification: x\nsources:\n",
                                   ResponseFormat::binary);
    EXPECT_EQ(b.decision, false);
}

TEST(Adapters, RecordThenReplayIsIdentical) {
    TempDir dir("transcript");
    const auto path = (dir.path() / "ai.jsonl").string();
    const auto plan = phase2_plan();
    auto mock = mock_for(plan);
    RecordingAdapter recorder(mock, path);
    std::vector<std::string> live;
    for (auto item : plan.study.items) {
        item.finalized = true;
        live.push_back(recorder.complete(build_prompt(item, *plan.study.corpus, item.format).text));
    }
    EXPECT_EQ(recorder.entries().size(), 20u);

    auto replay = ReplayAdapter::from_file(path);
    for (std::size_t i = 0; i < plan.study.items.size(); ++i) {
        auto item = plan.study.items[i];
        item.finalized = true;
        EXPECT_EQ(replay.complete(build_prompt(item, *plan.study.corpus, item.format).text), live[i]);
    }
    EXPECT_EQ(expect_code([&] { replay.complete("protocol: x\nitem_id: zz\n"); }), "replay miss");
}
