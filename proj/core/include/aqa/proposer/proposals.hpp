#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/aggdb/aggdb.hpp"
#include "aqa/aggdb/question.hpp"
#include "aqa/clients/chat.hpp"

namespace aqa::proposer {

/// Condition attributes plus the queried target, e.g. "user,topic->subtopic".
struct Combo {
    std::vector<Attribute> conditions;
    Attribute target = Attribute::Topic;

    std::string describe() const;
    friend bool operator==(const Combo&, const Combo&) = default;
};

/// "a,b->target"; "none->t" and "->t" have no conditions. Throws ParseError.
Combo parse_combo(std::string_view line);
/// One combo per line; blank lines and '#' comments skipped.
std::vector<Combo> read_combos(std::istream& in);
std::vector<Combo> load_combos(const std::string& path);
/// data/combos_default.txt shipped with the sources (AQA_COMBOS_FILE overrides).
std::string default_combos_path();

struct QuestionProposal {
    aggdb::ConditionSet conditions;
    Attribute target = Attribute::Topic;
    std::size_t support = 0;
    double top3_coverage = 0.0;
    double entropy = 0.0;
    std::string top1_value;

    friend bool operator==(const QuestionProposal&, const QuestionProposal&) = default;
};

nlohmann::json to_json(const QuestionProposal& p);
QuestionProposal proposal_from_json(const nlohmann::json& j);

struct AdmissionRules {
    std::size_t min_support = 50;
    std::size_t min_support_with_user = 10;  ///< when any condition is on the user
    double min_top3_coverage = 0.15;
};

/// Both checks: enough matching conversations and a concentrated enough
/// target distribution (rows sorted as aggregation rows).
bool admissible(const aggdb::ConditionSet& conditions, std::size_t support,
                const std::vector<aggdb::AggregationRow>& rows, const AdmissionRules& rules = {});

/// Top-3 share of all target occurrences; 0 without rows.
double top3_coverage(const std::vector<aggdb::AggregationRow>& rows);

/// -sum p log2 p / log2 m over m distinct positive counts, 0 when m = 1.
/// Throws InvalidArgument without a positive count.
double normalized_entropy(std::span<const std::size_t> counts);

using ProposalMap = std::map<std::string, std::vector<QuestionProposal>>;

/// Every condition-value configuration of every combo that passes the
/// admission checks, keyed by its top-1 target value. Each key's list is
/// sorted by entropy ascending (then support descending, then text).
/// Throws InvalidArgument when a combo's target is also a condition, or a
/// combo repeats more than one single-valued attribute.
ProposalMap enumerate_proposals(const aggdb::AggDb& db, const std::vector<Combo>& combos,
                                const AdmissionRules& rules = {});

/// Round-robin over the keys (sorted, then shuffled by the seed), one
/// proposal per key per pass, at most `per_key` proposals from any key.
std::vector<QuestionProposal> sample_proposals(const ProposalMap& proposals, std::uint64_t seed,
                                               std::size_t per_key = 2);

/// Natural-language question for a proposal through the question_generation
/// prompt. Throws ParseError on an empty response.
std::string render_question(const QuestionProposal& proposal, clients::ChatClient& client);

struct QuestionBuildParams {
    std::size_t candidates = aggdb::kDefaultCandidates;
    std::size_t max_questions = 0;  ///< 0: no limit
    std::uint64_t seed = 0;
};

struct QuestionBuildReport {
    std::vector<aggdb::AggregativeQuestion> questions;
    std::size_t skipped = 0;  ///< proposals whose target has too few distinct values
    std::vector<std::string> errors;  ///< proposals the client failed on
};

/// Graded candidates (in a seeded random order) and question text for
/// proposals in order; ids are "q-00001", ... in output order.
QuestionBuildReport build_questions(const aggdb::AggDb& db, const std::vector<QuestionProposal>& proposals,
                                    clients::ChatClient& client, const QuestionBuildParams& params = {});

void write_proposals(std::ostream& out, const std::vector<QuestionProposal>& ps);
std::vector<QuestionProposal> read_proposals(std::istream& in);

}  // namespace aqa::proposer
