#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aqa/aggdb/aggdb.hpp"

namespace aqa::aggdb {

/// One benchmark item: the natural-language question, its structured form
/// and graded answer candidates.
struct AggregativeQuestion {
    std::string id;
    std::string question_text;
    ConditionSet conditions;
    Attribute target = Attribute::Topic;
    std::vector<Candidate> candidates;
    std::vector<std::string> supporting_ids;

    friend bool operator==(const AggregativeQuestion&, const AggregativeQuestion&) = default;
};

nlohmann::json to_json(const AggregativeQuestion& q);
AggregativeQuestion question_from_json(const nlohmann::json& j);

void write_questions(std::ostream& out, const std::vector<AggregativeQuestion>& qs);
void write_questions(const std::string& path, const std::vector<AggregativeQuestion>& qs);
/// Throws ParseError with the line number on a bad record.
std::vector<AggregativeQuestion> read_questions(std::istream& in);
std::vector<AggregativeQuestion> read_questions(const std::string& path);

}  // namespace aqa::aggdb
