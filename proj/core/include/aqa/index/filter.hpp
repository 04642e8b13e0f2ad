#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/attribute.hpp"
#include "aqa/corpus/conversation.hpp"
#include "aqa/time.hpp"

namespace aqa::index {

/// Attribute values of one indexed document. Time is kept as a timestamp so
/// range clauses can be evaluated exactly.
struct DocMeta {
    Timestamp timestamp{};
    std::map<Attribute, std::vector<std::string>> values;

    const std::vector<std::string>& get(Attribute a) const;
};

DocMeta meta_from_conversation(const corpus::Conversation& c);

enum class Comparator { Equals, InSet, TimeRange };

struct FilterClause {
    Attribute attribute = Attribute::Location;
    Comparator op = Comparator::Equals;
    std::vector<std::string> values;  ///< one value for Equals
    TimeRange range{};                ///< only for TimeRange

    static FilterClause equals(Attribute a, std::string value);
    static FilterClause in_set(Attribute a, std::vector<std::string> values);
    static FilterClause time_range(TimeRange r);

    /// Multi-valued attributes pass when any of their values matches.
    bool matches(const DocMeta& meta) const;
    friend bool operator==(const FilterClause&, const FilterClause&) = default;
};

/// Conjunction of clauses; no clauses matches everything.
struct MetadataFilter {
    std::vector<FilterClause> clauses;

    bool empty() const noexcept { return clauses.empty(); }
    bool matches(const DocMeta& meta) const;
    friend bool operator==(const MetadataFilter&, const MetadataFilter&) = default;
};

nlohmann::json to_json(const FilterClause& c);
nlohmann::json to_json(const MetadataFilter& f);
nlohmann::json to_json(const DocMeta& m);
DocMeta meta_from_json(const nlohmann::json& j);

/// Strict parse; throws ParseError. Time clauses may be written as
/// {"attribute":"time","op":"range","begin":..,"end":..} or with an
/// "equals" period value such as "2023-04" or "2023-W17".
FilterClause clause_from_json(const nlohmann::json& j);
MetadataFilter filter_from_json(const nlohmann::json& j);

/// Parse of model-generated filters: malformed clauses and clauses on
/// inferred attributes are dropped and described in `dropped` instead of failing.
MetadataFilter filter_from_json_lenient(const nlohmann::json& j, std::vector<std::string>& dropped);

}  // namespace aqa::index
