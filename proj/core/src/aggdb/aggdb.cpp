#include "aqa/aggdb/aggdb.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "aqa/error.hpp"
#include "aqa/random.hpp"

namespace aqa::aggdb {

using nlohmann::json;

namespace {

std::size_t slot(Attribute a) { return static_cast<std::size_t>(a); }

}  // namespace

bool ConditionSet::has(Attribute a) const noexcept {
    return std::any_of(conditions.begin(), conditions.end(), [a](const Condition& c) { return c.attribute == a; });
}

void ConditionSet::validate() const {
    if (conditions.size() > kMaxConditions) {
        throw InvalidArgument("a condition set holds at most 3 conditions, got " + std::to_string(conditions.size()));
    }
    for (const auto& c : conditions) {
        if (c.attribute == Attribute::Time) parse_period(c.value);
    }
}

std::string ConditionSet::describe() const {
    std::string out;
    for (const auto& c : conditions) {
        if (!out.empty()) out += ", ";
        out += std::string(attribute_name(c.attribute)) + "=" + c.value;
    }
    return out;
}

json to_json(const ConditionSet& c) {
    json arr = json::array();
    for (const auto& x : c.conditions) arr.push_back({{"attribute", attribute_name(x.attribute)}, {"value", x.value}});
    return arr;
}

ConditionSet condition_set_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("conditions must be a list");
    ConditionSet cs;
    for (const auto& x : j) {
        if (!x.is_object() || !x.contains("attribute") || !x.contains("value")) {
            throw ParseError("condition needs 'attribute' and 'value'");
        }
        cs.conditions.push_back({require_attribute(x["attribute"].get<std::string>()), x["value"].get<std::string>()});
    }
    cs.validate();
    return cs;
}

void sort_rows(std::vector<AggregationRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const AggregationRow& a, const AggregationRow& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.value < b.value;
    });
}

AggDb::AggDb(const corpus::CorpusStore& store, TimeGranularity g)
    : store_(&store), granularity_(g), values_(kAllAttributes.size()), global_(kAllAttributes.size()) {
    for (Attribute a : kAllAttributes) {
        auto& col = values_[slot(a)];
        col.reserve(store.size());
        std::map<std::string, std::size_t> counts;
        for (const auto& c : store) {
            auto v = corpus::attribute_values(c, a, g);
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            std::erase(v, std::string());
            for (const auto& x : v) ++counts[x];
            col.push_back(std::move(v));
        }
        auto& rows = global_[slot(a)];
        for (auto& [v, n] : counts) rows.push_back({v, n});
        sort_rows(rows);
    }
}

const std::vector<std::string>& AggDb::values(std::size_t pos, Attribute a) const { return values_[slot(a)][pos]; }

bool AggDb::matches(std::size_t pos, const ConditionSet& cond) const {
    // Group by attribute: OR within single-valued groups, AND within multi-valued ones.
    for (Attribute a : kAllAttributes) {
        bool any_condition = false;
        bool any_hit = false;
        bool all_hit = true;
        for (const auto& c : cond.conditions) {
            if (c.attribute != a) continue;
            any_condition = true;
            bool hit;
            if (a == Attribute::Time) {
                hit = parse_period(c.value).contains(store_->conversations()[pos].timestamp);
            } else {
                const auto& vs = values(pos, a);
                hit = std::binary_search(vs.begin(), vs.end(), c.value);
            }
            any_hit = any_hit || hit;
            all_hit = all_hit && hit;
        }
        if (!any_condition) continue;
        if (is_multi_valued(a) ? !all_hit : !any_hit) return false;
    }
    return true;
}

std::vector<std::size_t> AggDb::match_positions(const ConditionSet& cond) const {
    cond.validate();
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < store_->size(); ++i) {
        if (matches(i, cond)) out.push_back(i);
    }
    return out;
}

std::vector<std::string> AggDb::match(const ConditionSet& cond) const {
    std::vector<std::string> ids;
    for (auto pos : match_positions(cond)) ids.push_back(store_->conversations()[pos].id);
    return ids;
}

AggregationResult AggDb::aggregate(const ConditionSet& cond, Attribute target) const {
    if (cond.has(target)) {
        throw InvalidArgument("target '" + std::string(attribute_name(target)) + "' is also a condition attribute");
    }
    AggregationResult r;
    r.target = target;
    std::map<std::string, std::size_t> counts;
    for (auto pos : match_positions(cond)) {
        ++r.support;
        for (const auto& v : values(pos, target)) ++counts[v];
    }
    for (auto& [v, n] : counts) r.rows.push_back({v, n});
    sort_rows(r.rows);
    return r;
}

const std::vector<AggregationRow>& AggDb::global_distribution(Attribute a) const { return global_[slot(a)]; }

CandidateSet AggDb::build_candidates(const ConditionSet& cond, Attribute target, std::size_t n,
                                     std::uint64_t seed) const {
    if (n == 0) throw InvalidArgument("candidate count must be positive");
    const AggregationResult agg = aggregate(cond, target);
    if (agg.rows.empty()) throw InvalidArgument("no conversation matches " + cond.describe() + " with a " +
                                                std::string(attribute_name(target)) + " value");
    CandidateSet out;
    std::set<std::string> chosen;
    for (std::size_t i = 0; i < agg.rows.size() && i < n; ++i) {
        out.candidates.push_back({agg.rows[i].value, agg.rows[i].count});
        chosen.insert(agg.rows[i].value);
    }
    if (out.candidates.size() < n) {
        std::vector<const AggregationRow*> pool;
        for (const auto& row : global_distribution(target)) {
            if (!chosen.count(row.value)) pool.push_back(&row);
        }
        if (out.candidates.size() + pool.size() < n) {
            throw InvalidArgument("attribute '" + std::string(attribute_name(target)) + "' has only " +
                                  std::to_string(out.candidates.size() + pool.size()) +
                                  " distinct values, cannot build " + std::to_string(n) + " candidates");
        }
        Rng rng(seed);
        while (out.candidates.size() < n) {
            std::vector<double> w;
            w.reserve(pool.size());
            for (const auto* row : pool) w.push_back(static_cast<double>(row->count));
            const std::size_t i = rng.weighted(w);
            out.candidates.push_back({pool[i]->value, 0});
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }
    for (auto pos : match_positions(cond)) {
        const auto& vs = values(pos, target);
        const bool graded = std::any_of(vs.begin(), vs.end(), [&](const std::string& v) {
            return std::any_of(out.candidates.begin(), out.candidates.end(),
                               [&](const Candidate& c) { return c.grade > 0 && c.value == v; });
        });
        if (graded) out.supporting_ids.push_back(store_->conversations()[pos].id);
    }
    return out;
}

}  // namespace aqa::aggdb
