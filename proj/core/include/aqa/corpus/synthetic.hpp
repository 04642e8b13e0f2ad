#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "aqa/corpus/conversation.hpp"

namespace aqa::corpus {

/// Knobs of the planted-distribution corpus generator.
struct SyntheticParams {
    std::size_t conversations = 1000;
    std::size_t active_users = 60;
    std::size_t inactive_users = 5;     ///< users that end up below the activity threshold
    std::uint64_t seed = 7;
    double duplicate_rate = 0.03;       ///< near-copies of an earlier conversation
    double long_rate = 0.01;            ///< conversations pushed past 4096 tokens
    double keyword_variant_rate = 0.15; ///< raw spelling variants of canonical keywords
    double second_topic_rate = 0.1;
    double topic_mention_rate = 0.4;    ///< texts and summaries that name the topic label
    std::size_t min_turns = 6;          ///< dialogue turns per topic, before the long-text padding
    std::size_t max_turns = 60;
    std::string start_month = "2023-04";
    unsigned months = 12;
};

struct ConversationOrigin {
    std::string ip;
    std::string headers;
};

struct SyntheticCorpus {
    std::vector<Conversation> conversations;   ///< users already derived from origins
    std::vector<ConversationOrigin> origins;   ///< parallel to conversations
    std::map<std::string, std::string> keyword_kinds;  ///< raw keyword (incl. variants) -> kind
    std::map<std::string, std::vector<std::string>> subtopics_of;  ///< topic -> subtopics
    std::map<std::string, std::vector<std::string>> keywords_of;   ///< topic -> canonical keywords
};

/// Deterministic for a fixed parameter set. Topic, subtopic, keyword, time
/// and location distributions are planted so aggregative questions have
/// well-defined, non-uniform answers.
SyntheticCorpus generate_synthetic(const SyntheticParams& params);

/// Writes ingestible records carrying ip/headers instead of usernames.
void write_synthetic_jsonl(const SyntheticCorpus& corpus, std::ostream& out);

/// "keyword<TAB>kind" lines, sorted by keyword.
void write_keyword_kinds(const SyntheticCorpus& corpus, std::ostream& out);

}  // namespace aqa::corpus
