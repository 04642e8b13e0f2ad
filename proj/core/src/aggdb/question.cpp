#include "aqa/aggdb/question.hpp"

#include <fstream>
#include <set>

#include "aqa/error.hpp"

namespace aqa::aggdb {

using nlohmann::json;

json to_json(const AggregativeQuestion& q) {
    json cands = json::array();
    for (const auto& c : q.candidates) cands.push_back({{"value", c.value}, {"grade", c.grade}});
    return {{"id", q.id},
            {"question_text", q.question_text},
            {"conditions", to_json(q.conditions)},
            {"target", attribute_name(q.target)},
            {"candidates", cands},
            {"supporting_ids", q.supporting_ids}};
}

AggregativeQuestion question_from_json(const json& j) {
    AggregativeQuestion q;
    try {
        q.id = j.at("id").get<std::string>();
        q.question_text = j.at("question_text").get<std::string>();
        q.conditions = condition_set_from_json(j.at("conditions"));
        q.target = require_attribute(j.at("target").get<std::string>());
        std::set<std::string> seen;
        for (const auto& c : j.at("candidates")) {
            Candidate cand{c.at("value").get<std::string>(), c.at("grade").get<std::uint64_t>()};
            if (!seen.insert(cand.value).second) throw ParseError("duplicate candidate '" + cand.value + "'");
            q.candidates.push_back(std::move(cand));
        }
        q.supporting_ids = j.at("supporting_ids").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad question record: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("bad question record: ") + e.what());
    }
    return q;
}

void write_questions(std::ostream& out, const std::vector<AggregativeQuestion>& qs) {
    for (const auto& q : qs) out << to_json(q).dump() << '\n';
}

void write_questions(const std::string& path, const std::vector<AggregativeQuestion>& qs) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    write_questions(out, qs);
}

std::vector<AggregativeQuestion> read_questions(std::istream& in) {
    std::vector<AggregativeQuestion> qs;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            qs.push_back(question_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return qs;
}

std::vector<AggregativeQuestion> read_questions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open questions file '" + path + "'");
    return read_questions(in);
}

}  // namespace aqa::aggdb
