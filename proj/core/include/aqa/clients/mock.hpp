#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/attribute.hpp"
#include "aqa/clients/chat.hpp"
#include "aqa/clients/embedder.hpp"
#include "aqa/corpus/conversation.hpp"

namespace aqa::clients {

/// Everything the offline mocks know. Same policy and same input give
/// byte-identical output.
struct MockPolicy {
    std::uint64_t seed = 0;
    std::size_t embedding_dim = index::kDefaultEmbeddingDim;
    /// Metadata values recognized in questions and turned into filters.
    std::map<Attribute, std::vector<std::string>> metadata_values;
    /// Content phrases (topics, subtopics, keywords) recognized in questions.
    std::vector<std::string> content_terms;
    /// Related phrases a content term expands into when generating queries.
    std::map<std::string, std::vector<std::string>> expansions;
    /// Label names the taxonomy mock can discover in batches.
    std::vector<std::string> labels;
    /// Canned responses per prompt id, served in order; the last one repeats.
    std::map<std::string, std::vector<std::string>> fixed_responses;
};

nlohmann::json to_json(const MockPolicy& p);
MockPolicy mock_policy_from_json(const nlohmann::json& j);

/// Policy whose vocabulary comes from a corpus: its metadata values, its
/// topic/subtopic/keyword labels, and per topic the subtopics and most
/// frequent keywords seen with it as expansions.
MockPolicy mock_policy_from_corpus(const corpus::CorpusStore& store, std::uint64_t seed = 0,
                                   std::size_t keywords_per_topic = 5);

/// Deterministic stand-in for a chat model, one behavior per prompt id:
///  - taxonomy_initial / taxonomy_update: labels from the policy found in
///    the batch, merged with the current taxonomy; score = label count.
///  - label_assignment: taxonomy labels mentioned in the item, relevance
///    proportional to mentions; "Undefined" when none is.
///  - question_generation: "Among conversations where <a> is <v> and ...,
///    which <target> is most common?"
///  - probe_queries: filters from recognized metadata values and periods,
///    queries from recognized content terms and their expansions.
///  - answer_ranking: candidates by case-insensitive mentions in the
///    context, ties in input order.
class MockChatClient : public ChatClient {
public:
    MockChatClient(PromptLibrary prompts, MockPolicy policy);
    std::string complete(const std::string& prompt_id, const std::string& rendered,
                         const PromptVariables& vars) override;
    const MockPolicy& policy() const noexcept { return policy_; }

private:
    MockPolicy policy_;
    std::mutex mu_;
    std::map<std::string, std::size_t> served_;
};

/// Feature-hashed bag of words: lowercase word tokens minus stopwords, each
/// adding a seeded +-1 to one of dim coordinates, then normalized.
class MockEmbedder : public Embedder {
public:
    explicit MockEmbedder(std::size_t dim = index::kDefaultEmbeddingDim, std::uint64_t seed = 0);
    std::vector<index::EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Whole-phrase, case-insensitive occurrences of needle in haystack; a
/// match may not touch a letter or digit on either side.
std::size_t count_mentions(std::string_view haystack, std::string_view needle);

}  // namespace aqa::clients
