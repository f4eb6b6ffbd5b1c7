#include <gtest/gtest.h>

#include "delphi/delphi.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace delphi;
using namespace fixtures;

namespace {

struct Contribution {
    std::string section;
    ReasoningCodeSet cs;
};

/// Experts X1..Xn; expert k answers one item per contribution.
Study panel_study(const std::vector<std::vector<Contribution>>& experts, std::size_t sections = 3) {
    Study s;
    s.id = "sat";
    for (std::size_t k = 0; k < sections; ++k) s.sections.push_back({"s" + std::to_string(k + 1), "S"});
    for (std::size_t e = 0; e < experts.size(); ++e) {
        const std::string pid = "X" + std::to_string(e + 1);
        s.panel.push_back({pid, Role::senior_expert, pid});
        for (std::size_t j = 0; j < experts[e].size(); ++j) {
            const std::string item = "i" + std::to_string(e + 1) + "_" + std::to_string(j + 1);
            s.items.push_back({item, experts[e][j].section, "S", ItemKind::fixed, ItemOrigin::a_priori,
                               ResponseFormat::likert, true, std::nullopt});
            s.responses.push_back(response(item, pid, 4, experts[e][j].cs));
        }
    }
    return s;
}

}  // namespace

TEST(Coverage, DisjointExpertsGrowStrictly) {
    const auto s = panel_study({{{"s1", codes({EB})}}, {{"s2", codes({PR})}}, {{"s3", codes({EX})}}});
    const auto t = cumulative_coverage(s, Role::senior_expert);
    ASSERT_EQ(t.steps.size(), 3u);
    EXPECT_LT(t.steps[0].size(), t.steps[1].size());
    EXPECT_LT(t.steps[1].size(), t.steps[2].size());
    EXPECT_EQ(t.steps[2], t.required);
}

TEST(Coverage, DuplicateExpertAddsNothing) {
    const auto s = panel_study({{{"s1", codes({EB, PR})}}, {{"s1", codes({EB, PR})}}, {{"s2", codes({EX})}}});
    const auto t = cumulative_coverage(s, Role::senior_expert);
    EXPECT_EQ(t.steps[0], t.steps[1]);
}

TEST(Coverage, Errors) {
    auto s = panel_study({{{"s1", codes({EB})}}, {{"s2", codes({PR})}}});
    const std::vector<std::string> bad{"X1", "X9"};
    try {
        cumulative_coverage(s, Role::senior_expert, bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "invalid ordering");
    }
    s.responses[0].codes = {};
    try {
        cumulative_coverage(s, Role::senior_expert);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "incomplete coding");
    }
}

TEST(Coverage, PhaseTwoCategoriesCompleteByFourthExpert) {
    const auto s = coded_study(phase2_plan());
    const auto t = cumulative_coverage(s, Role::senior_expert);
    for (std::size_t k = 1; k <= t.steps.size(); ++k) {
        std::set<Category> cats;
        for (const auto& [c, sec] : t.steps[k - 1]) cats.insert(c);
        EXPECT_EQ(cats.size() == kCategoryCount, k >= 4) << "prefix " << k;
    }
    EXPECT_TRUE(t.category_complete);
}

TEST(Index, PhaseTwoCanonicalIsFive) {
    const auto s = coded_study(phase2_plan());
    EXPECT_EQ(saturation_index(cumulative_coverage(s, Role::senior_expert), novelty_panelists(s)), 5u);
}

TEST(Index, IdenticalExpertsSaturateAtOne) {
    const auto s = panel_study({{{"s1", codes({EB})}}, {{"s1", codes({EB})}}, {{"s1", codes({EB})}}});
    EXPECT_EQ(saturation_index(cumulative_coverage(s, Role::senior_expert)), 1u);
}

TEST(Index, LastExpertUniqueMeansNone) {
    const auto s = panel_study({{{"s1", codes({EB})}}, {{"s1", codes({EB})}}, {{"s1", codes({EB, PR})}}});
    EXPECT_EQ(saturation_index(cumulative_coverage(s, Role::senior_expert)), std::nullopt);
}

TEST(Index, NoveltyFlagDefersSaturation) {
    const auto s = panel_study({{{"s1", codes({EB})}}, {{"s1", codes({EB})}}, {{"s1", codes({EB})}},
                                {{"s1", codes({EB})}}});
    const auto t = cumulative_coverage(s, Role::senior_expert);
    EXPECT_EQ(saturation_index(t, {"X3"}), 3u);
    EXPECT_EQ(saturation_index(t, {"X4"}), std::nullopt);
}

TEST(Robustness, PhaseTwoExhaustive) {
    const auto s = coded_study(phase2_plan());
    const auto r = permutation_robustness(s, Role::senior_expert);
    EXPECT_EQ(r.per_ordering_indices.size(), 720u);
    EXPECT_LE(r.max_index, 5u);
    EXPECT_TRUE(r.robust);
    EXPECT_EQ(r.saturation_index, 5u);
}

TEST(Robustness, AdversarialUniqueCoverage) {
    const auto s = coded_study(phase2_plan(true));
    const auto r = permutation_robustness(s, Role::senior_expert);
    EXPECT_EQ(r.max_index, 6u);
    EXPECT_FALSE(r.robust);
}

TEST(Robustness, TwoIdenticalExperts) {
    const auto s = panel_study({{{"s1", codes({EB, PR})}}, {{"s1", codes({EB, PR})}}});
    const auto r = permutation_robustness(s, Role::senior_expert);
    ASSERT_EQ(r.per_ordering_indices.size(), 2u);
    for (const auto& [key, k] : r.per_ordering_indices) EXPECT_EQ(k, 1u) << key;
}

TEST(Robustness, SampledIsSeedDeterministic) {
    const auto s = coded_study(phase2_plan());
    const auto a = permutation_robustness(s, Role::senior_expert, RobustnessMode::sampled(50, 7));
    const auto b = permutation_robustness(s, Role::senior_expert, RobustnessMode::sampled(50, 7));
    EXPECT_EQ(a.per_ordering_indices, b.per_ordering_indices);
    const auto full = permutation_robustness(s, Role::senior_expert);
    for (const auto& [key, k] : a.per_ordering_indices) EXPECT_EQ(full.per_ordering_indices.at(key), k);
}

TEST(Robustness, ExhaustiveCeiling) {
    const auto s = coded_study(strength_plan());
    try {
        permutation_robustness(s, Role::less_experienced, RobustnessMode::exhaustive());
        SUCCEED();  // eight is at the ceiling
    } catch (const Error&) {
        FAIL();
    }
    std::vector<std::vector<Contribution>> nine(9, {{"s1", codes({EB})}});
    try {
        permutation_robustness(panel_study(nine), Role::senior_expert);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "panel too large for exhaustive mode");
    }
}

TEST(Robustness, MaxIndexMatchesOracleOnPhaseTwo) {
    const auto s = coded_study(phase2_plan(true));
    const auto r = permutation_robustness(s, Role::senior_expert);
    std::map<std::string, oracle::Contribution> by_id;
    for (const auto& resp : s.responses) {
        if (s.role_of(resp.panelist_id) != Role::senior_expert) continue;
        for (auto c : resp.codes.categories()) {
            by_id[resp.panelist_id].insert(oracle::pair_key(std::string(to_string(c)), s.find_item(resp.item_id)->section_id));
        }
    }
    std::vector<std::string> ids;
    for (const auto& [id, c] : by_id) ids.push_back(id);
    do {
        std::vector<oracle::Contribution> panel;
        std::string key;
        for (const auto& id : ids) {
            panel.push_back(by_id[id]);
            key += (key.empty() ? "" : ">") + id;
        }
        const auto k = oracle::smallest_covering_prefix(panel);
        EXPECT_EQ(r.per_ordering_indices.at(key), k == 0 ? ids.size() : k) << key;
    } while (std::next_permutation(ids.begin(), ids.end()));
}

TEST(CoverageCsv, OneRowPerPrefix) {
    const auto s = coded_study(phase2_plan());
    const auto text = coverage_curve_csv(cumulative_coverage(s, Role::senior_expert));
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
}
