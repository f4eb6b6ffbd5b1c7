#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "delphi/error.hpp"
#include "delphi/model.hpp"

namespace delphi {

/// (category, section id)
using CoveragePair = std::pair<Category, std::string>;
using PairSet = std::set<CoveragePair>;

struct CoverageTrajectory {
    std::vector<std::string> ordering;
    std::vector<PairSet> steps;  // steps[k-1] = union over the first k panelists
    PairSet required;
    bool category_complete = false;

    std::size_t panel_size() const { return ordering.size(); }
};

namespace detail {

inline void require_permutation(const std::vector<std::string>& members, std::span<const std::string> ordering) {
    std::vector<std::string> a(members.begin(), members.end());
    std::vector<std::string> b(ordering.begin(), ordering.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw Error("invalid ordering", "ordering is not a permutation of the sub-panel");
}

inline std::vector<std::string> member_ids(const Study& study, Role role) {
    std::vector<std::string> ids;
    for (const auto* p : study.panelists_with_role(role)) ids.push_back(p->id);
    return ids;
}

/// Pairs contributed by each panelist, keyed by id.
inline std::map<std::string, PairSet> contributions(const Study& study, const std::vector<std::string>& members) {
    std::map<std::string, PairSet> out;
    for (const auto& id : members) out[id];
    for (const auto& r : study.responses) {
        auto it = out.find(r.panelist_id);
        if (it == out.end()) continue;
        if (!r.coded()) throw Error("incomplete coding", response_id(r));
        const Item* item = study.find_item(r.item_id);
        if (!item) continue;
        for (auto c : r.codes.categories()) it->second.emplace(c, item->section_id);
    }
    return out;
}

}  // namespace detail

/// Per-prefix union of (category, section) pairs for one role's sub-panel.
inline CoverageTrajectory cumulative_coverage(const Study& study, Role role, std::span<const std::string> ordering) {
    const auto members = detail::member_ids(study, role);
    detail::require_permutation(members, ordering);
    const auto contrib = detail::contributions(study, members);

    CoverageTrajectory t;
    t.ordering.assign(ordering.begin(), ordering.end());
    PairSet acc;
    for (const auto& id : ordering) {
        const auto& mine = contrib.at(id);
        acc.insert(mine.begin(), mine.end());
        t.steps.push_back(acc);
    }
    t.required = acc;
    std::set<Category> cats;
    for (const auto& [c, s] : t.required) cats.insert(c);
    t.category_complete = cats.size() == kCategoryCount;
    return t;
}

inline CoverageTrajectory cumulative_coverage(const Study& study, Role role) {
    const auto members = detail::member_ids(study, role);
    return cumulative_coverage(study, role, members);
}

/// Smallest prefix k covering `required` with no novelty-flagged panelist
/// after position k. nullopt when only the full panel qualifies.
inline std::optional<std::size_t> saturation_index(const CoverageTrajectory& trajectory,
                                                   const std::set<std::string>& novelty_panelists = {}) {
    const auto n = trajectory.panel_size();
    // Last 1-based position holding a novelty flag; saturation cannot precede it.
    std::size_t last_novel = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (novelty_panelists.count(trajectory.ordering[i])) last_novel = i + 1;
    }
    for (std::size_t k = std::max<std::size_t>(1, last_novel); k <= n; ++k) {
        if (trajectory.steps[k - 1] == trajectory.required) {
            if (k == n) return std::nullopt;
            return k;
        }
    }
    return std::nullopt;
}

/// Panelists with at least one novelty-flagged response.
inline std::set<std::string> novelty_panelists(const Study& study) {
    std::set<std::string> out;
    for (const auto& r : study.responses) {
        if (r.novelty_flag) out.insert(r.panelist_id);
    }
    return out;
}

struct RobustnessMode {
    enum class Kind { exhaustive, sampled };
    Kind kind = Kind::exhaustive;
    std::size_t count = 1000;
    std::optional<std::uint64_t> seed;

    static RobustnessMode exhaustive() { return {}; }
    static RobustnessMode sampled(std::size_t count, std::uint64_t seed) { return {Kind::sampled, count, seed}; }
};

inline constexpr std::size_t kExhaustiveCeiling = 8;

struct SaturationReport {
    std::string role;
    std::size_t panel_size = 0;
    std::optional<std::size_t> saturation_index;  // canonical order, novelty-aware
    CoverageTrajectory canonical;
    /// Ordering key ("e1>e2>...") -> coverage-only index.
    std::map<std::string, std::size_t> per_ordering_indices;
    std::size_t max_index = 0;
    bool robust = false;
    RobustnessMode evaluated;
};

namespace detail {

/// Bitmask over (category, section) pairs for fast per-ordering evaluation.
class PairMask {
public:
    explicit PairMask(std::size_t bits = 0) : words_((bits + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    PairMask& operator|=(const PairMask& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    bool operator==(const PairMask&) const = default;
    void clear() { std::fill(words_.begin(), words_.end(), 0); }

private:
    std::vector<std::uint64_t> words_;
};

inline std::string ordering_key(std::span<const std::string> ids) {
    std::string key;
    for (const auto& id : ids) {
        if (!key.empty()) key += '>';
        key += id;
    }
    return key;
}

}  // namespace detail

/// Coverage-only saturation index for every evaluated ordering of a role's
/// sub-panel. Novelty flags are not used here (they are order-dependent).
inline SaturationReport permutation_robustness(const Study& study, Role role,
                                               RobustnessMode mode = RobustnessMode::exhaustive()) {
    const auto members = detail::member_ids(study, role);
    const auto n = members.size();
    if (n == 0) throw Error("empty panel", std::string(enum_name(role)));
    if (mode.kind == RobustnessMode::Kind::exhaustive && n > kExhaustiveCeiling) {
        throw Error("panel too large for exhaustive mode", std::to_string(n) + " panelists");
    }
    if (mode.kind == RobustnessMode::Kind::sampled && !mode.seed) throw Error("missing seed");

    SaturationReport report;
    report.role = std::string(enum_name(role));
    report.panel_size = n;
    report.evaluated = mode;
    report.canonical = cumulative_coverage(study, role, members);
    report.saturation_index = saturation_index(report.canonical, novelty_panelists(study));

    // Index pairs and build one mask per panelist.
    std::map<CoveragePair, std::size_t> pair_index;
    for (const auto& p : report.canonical.required) pair_index.emplace(p, pair_index.size());
    const auto contrib = detail::contributions(study, members);
    std::vector<detail::PairMask> masks(n, detail::PairMask(pair_index.size()));
    detail::PairMask full(pair_index.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& p : contrib.at(members[i])) {
            masks[i].set(pair_index.at(p));
            full.set(pair_index.at(p));
        }
    }

    std::vector<std::size_t> order(n);
    std::vector<std::string> ids(n);
    detail::PairMask acc(pair_index.size());
    auto evaluate = [&] {
        acc.clear();
        std::size_t k = n;
        for (std::size_t pos = 0; pos < n; ++pos) {
            acc |= masks[order[pos]];
            if (acc == full) {
                k = pos + 1;
                break;
            }
        }
        for (std::size_t pos = 0; pos < n; ++pos) ids[pos] = members[order[pos]];
        report.per_ordering_indices[detail::ordering_key(ids)] = k;
        report.max_index = std::max(report.max_index, k);
    };

    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    if (mode.kind == RobustnessMode::Kind::exhaustive) {
        do {
            evaluate();
        } while (std::next_permutation(order.begin(), order.end()));
    } else {
        // Fisher-Yates over mt19937_64 with modulo draws, so a seed gives the
        // same orderings on every standard library.
        std::mt19937_64 rng(*mode.seed);
        for (std::size_t s = 0; s < mode.count; ++s) {
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
            evaluate();
        }
    }
    report.robust = report.max_index < n;
    return report;
}

/// `prefix_k,pairs_covered,required`
inline std::string coverage_curve_csv(const CoverageTrajectory& t) {
    std::ostringstream out;
    out << "prefix_k,pairs_covered,required\n";
    for (std::size_t k = 1; k <= t.steps.size(); ++k) {
        out << k << ',' << t.steps[k - 1].size() << ',' << t.required.size() << '\n';
    }
    return out.str();
}

/// Index value -> number of orderings reaching it.
inline std::map<std::size_t, std::size_t> index_histogram(const SaturationReport& report) {
    std::map<std::size_t, std::size_t> h;
    for (const auto& [key, k] : report.per_ordering_indices) ++h[k];
    return h;
}

}  // namespace delphi
