#include "aqa/index/filter.hpp"

#include <algorithm>

#include "aqa/error.hpp"

namespace aqa::index {

using nlohmann::json;

const std::vector<std::string>& DocMeta::get(Attribute a) const {
    static const std::vector<std::string> empty;
    auto it = values.find(a);
    return it == values.end() ? empty : it->second;
}

DocMeta meta_from_conversation(const corpus::Conversation& c) {
    DocMeta m;
    m.timestamp = c.timestamp;
    for (Attribute a : kAllAttributes) {
        if (a == Attribute::Time) continue;
        m.values[a] = corpus::attribute_values(c, a);
    }
    return m;
}

FilterClause FilterClause::equals(Attribute a, std::string value) {
    if (a == Attribute::Time) return time_range(parse_period(value));
    FilterClause c;
    c.attribute = a;
    c.op = Comparator::Equals;
    c.values = {std::move(value)};
    return c;
}

FilterClause FilterClause::in_set(Attribute a, std::vector<std::string> values) {
    if (a == Attribute::Time) throw InvalidArgument("time clauses must be ranges");
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    FilterClause c;
    c.attribute = a;
    c.op = Comparator::InSet;
    c.values = std::move(values);
    return c;
}

FilterClause FilterClause::time_range(TimeRange r) {
    if (r.end < r.begin) throw InvalidArgument("time range ends before it begins");
    FilterClause c;
    c.attribute = Attribute::Time;
    c.op = Comparator::TimeRange;
    c.range = r;
    return c;
}

bool FilterClause::matches(const DocMeta& meta) const {
    if (op == Comparator::TimeRange) return range.contains(meta.timestamp);
    for (const auto& v : meta.get(attribute)) {
        if (op == Comparator::Equals ? v == values.front()
                                     : std::binary_search(values.begin(), values.end(), v)) {
            return true;
        }
    }
    return false;
}

bool MetadataFilter::matches(const DocMeta& meta) const {
    return std::all_of(clauses.begin(), clauses.end(), [&](const FilterClause& c) { return c.matches(meta); });
}

json to_json(const FilterClause& c) {
    json j;
    j["attribute"] = std::string(attribute_name(c.attribute));
    switch (c.op) {
        case Comparator::Equals:
            j["op"] = "equals";
            j["value"] = c.values.front();
            break;
        case Comparator::InSet:
            j["op"] = "in";
            j["values"] = c.values;
            break;
        case Comparator::TimeRange:
            j["op"] = "range";
            j["begin"] = format_rfc3339(c.range.begin);
            j["end"] = format_rfc3339(c.range.end);
            break;
    }
    return j;
}

json to_json(const MetadataFilter& f) {
    json arr = json::array();
    for (const auto& c : f.clauses) arr.push_back(to_json(c));
    return arr;
}

json to_json(const DocMeta& m) {
    json j;
    j["timestamp"] = format_rfc3339(m.timestamp);
    for (const auto& [a, v] : m.values) j[std::string(attribute_name(a))] = v;
    return j;
}

DocMeta meta_from_json(const json& j) {
    if (!j.is_object() || !j.contains("timestamp")) throw ParseError("document metadata lacks a timestamp");
    DocMeta m;
    m.timestamp = parse_rfc3339(j["timestamp"].get<std::string>());
    for (const auto& [key, value] : j.items()) {
        if (key == "timestamp") continue;
        auto a = parse_attribute(key);
        if (!a) throw ParseError("unknown metadata attribute '" + key + "'");
        m.values[*a] = value.get<std::vector<std::string>>();
    }
    return m;
}

FilterClause clause_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("filter clause is not an object");
    if (!j.contains("attribute") || !j["attribute"].is_string()) throw ParseError("filter clause lacks 'attribute'");
    const auto name = j["attribute"].get<std::string>();
    const auto attr = parse_attribute(name);
    if (!attr) throw ParseError("unknown filter attribute '" + name + "'");
    const std::string op = j.value("op", std::string("equals"));
    try {
        if (op == "equals" || op == "eq" || op == "=") {
            if (!j.contains("value") || !j["value"].is_string()) throw ParseError("equals clause lacks a string 'value'");
            return FilterClause::equals(*attr, j["value"].get<std::string>());
        }
        if (op == "in" || op == "in_set") {
            if (!j.contains("values") || !j["values"].is_array()) throw ParseError("in clause lacks 'values'");
            return FilterClause::in_set(*attr, j["values"].get<std::vector<std::string>>());
        }
        if (op == "range" || op == "time_range") {
            if (*attr != Attribute::Time) throw ParseError("range clauses apply to time only");
            return FilterClause::time_range(
                {parse_rfc3339(j.at("begin").get<std::string>()), parse_rfc3339(j.at("end").get<std::string>())});
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad filter clause: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    throw ParseError("unknown filter operator '" + op + "'");
}

MetadataFilter filter_from_json(const json& j) {
    if (j.is_null()) return {};
    if (!j.is_array()) throw ParseError("filter must be a list of clauses");
    MetadataFilter f;
    for (const auto& c : j) f.clauses.push_back(clause_from_json(c));
    return f;
}

MetadataFilter filter_from_json_lenient(const json& j, std::vector<std::string>& dropped) {
    MetadataFilter f;
    if (j.is_null()) return f;
    if (!j.is_array()) {
        dropped.push_back("filters are not a list: " + j.dump());
        return f;
    }
    for (const auto& cj : j) {
        try {
            FilterClause c = clause_from_json(cj);
            if (is_inferred(c.attribute)) {
                dropped.push_back("attribute '" + std::string(attribute_name(c.attribute)) +
                                  "' is not filterable: " + cj.dump());
                continue;
            }
            f.clauses.push_back(std::move(c));
        } catch (const ParseError& e) {
            dropped.push_back(std::string(e.what()) + ": " + cj.dump());
        }
    }
    return f;
}

}  // namespace aqa::index
