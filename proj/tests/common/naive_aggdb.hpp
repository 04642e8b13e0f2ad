#pragma once

// Full-scan reference for condition matching, aggregation and candidates.
// Reads conversation fields directly instead of going through AggDb.

#include <aqa/aggdb/aggdb.hpp>
#include <aqa/corpus/conversation.hpp>
#include <aqa/random.hpp>
#include <aqa/time.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace aqa::oracle {

inline std::set<std::string> field_values(const corpus::Conversation& c, Attribute a) {
    switch (a) {
        case Attribute::Location: return {c.location};
        case Attribute::User: return {c.user};
        case Attribute::Language: return {c.language};
        case Attribute::Time: return {time_bucket(c.timestamp, TimeGranularity::Month)};
        case Attribute::Topic: return {c.topics.begin(), c.topics.end()};
        case Attribute::Subtopic: return {c.subtopics.begin(), c.subtopics.end()};
        case Attribute::Keywords: return {c.keywords.begin(), c.keywords.end()};
    }
    return {};
}

inline bool condition_holds(const corpus::Conversation& c, const aggdb::Condition& cond) {
    if (cond.attribute == Attribute::Time) return parse_period(cond.value).contains(c.timestamp);
    return field_values(c, cond.attribute).contains(cond.value);
}

inline bool naive_matches(const corpus::Conversation& c, const aggdb::ConditionSet& cs) {
    std::map<Attribute, std::vector<const aggdb::Condition*>> by_attr;
    for (const auto& cond : cs.conditions) by_attr[cond.attribute].push_back(&cond);
    for (const auto& [attr, conds] : by_attr) {
        const bool any_of = !is_multi_valued(attr);
        bool ok = !any_of;
        for (const auto* cond : conds) {
            const bool h = condition_holds(c, *cond);
            if (any_of) ok = ok || h;
            else ok = ok && h;
        }
        if (!ok) return false;
    }
    return true;
}

inline std::vector<std::string> naive_match(const corpus::CorpusStore& store, const aggdb::ConditionSet& cs) {
    std::vector<std::string> out;
    for (const auto& c : store)
        if (naive_matches(c, cs)) out.push_back(c.id);
    return out;
}

inline aggdb::AggregationResult naive_aggregate(const corpus::CorpusStore& store, const aggdb::ConditionSet& cs,
                                                Attribute target) {
    aggdb::AggregationResult r;
    r.target = target;
    std::map<std::string, std::size_t> counts;
    for (const auto& c : store) {
        if (!naive_matches(c, cs)) continue;
        ++r.support;
        for (const auto& v : field_values(c, target)) ++counts[v];
    }
    for (const auto& [v, n] : counts) r.rows.push_back({v, n});
    std::stable_sort(r.rows.begin(), r.rows.end(),
                     [](const aggdb::AggregationRow& a, const aggdb::AggregationRow& b) { return a.count > b.count; });
    return r;
}

/// Graded part of a candidate set plus its supporting ids; padding is
/// random and checked by property instead.
struct GradedCandidates {
    std::vector<aggdb::Candidate> graded;
    std::vector<std::string> supporting_ids;
};

inline GradedCandidates naive_graded(const corpus::CorpusStore& store, const aggdb::ConditionSet& cs, Attribute target,
                                     std::size_t n) {
    auto agg = naive_aggregate(store, cs, target);
    GradedCandidates g;
    std::set<std::string> top;
    for (std::size_t i = 0; i < agg.rows.size() && i < n; ++i) {
        g.graded.push_back({agg.rows[i].value, agg.rows[i].count});
        top.insert(agg.rows[i].value);
    }
    for (const auto& c : store) {
        if (!naive_matches(c, cs)) continue;
        for (const auto& v : field_values(c, target)) {
            if (top.contains(v)) {
                g.supporting_ids.push_back(c.id);
                break;
            }
        }
    }
    return g;
}

/// Random condition set over values present in the store (occasionally an
/// absent value), plus a target distinct from every condition attribute.
inline std::pair<aggdb::ConditionSet, Attribute> random_query(const corpus::CorpusStore& store, Rng& rng) {
    aggdb::ConditionSet cs;
    const std::size_t n = rng.below(4);
    std::vector<Attribute> attrs(kAllAttributes.begin(), kAllAttributes.end());
    for (std::size_t i = 0; i < n; ++i) {
        Attribute a = attrs[rng.below(attrs.size())];
        const auto& conv = store.conversations()[rng.below(store.size())];
        std::string value;
        auto vals = field_values(conv, a);
        if (vals.empty() || rng.bernoulli(0.05)) {
            value = a == Attribute::Time ? "1999-01" : "absent-value";
        } else {
            auto it = vals.begin();
            std::advance(it, rng.below(vals.size()));
            value = *it;
        }
        cs.conditions.push_back({a, value});
    }
    std::vector<Attribute> targets;
    for (Attribute a : kAllAttributes)
        if (!cs.has(a)) targets.push_back(a);
    return {cs, targets[rng.below(targets.size())]};
}

}  // namespace aqa::oracle
