#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/aggdb/question.hpp"
#include "aqa/clients/chat.hpp"
#include "aqa/corpus/conversation.hpp"
#include "aqa/eval/metrics.hpp"
#include "aqa/index/documents.hpp"
#include "aqa/probe/probe.hpp"

namespace aqa::eval {

inline const std::vector<std::size_t> kNdcgKs = {1, 3, 5, 10};
inline const std::vector<std::size_t> kRecallKs = {5, 10, 20, 50, 100, 200, 500};

/// Evidence conversations as prompt context: per conversation a header
/// line "[n] user=.. time=.. location=.. language=.." followed by its
/// summary (summary granularity) or transcript (raw). Unknown ids throw NotFound.
std::string render_context(const std::vector<std::string>& ids, const corpus::CorpusStore& store,
                           index::TextGranularity granularity);

/// Candidate values ordered by the client. The answer must name every
/// candidate exactly once (case-insensitive); throws ParseError otherwise.
std::vector<std::string> rank_candidates(const std::string& question, const std::vector<std::string>& candidates,
                                         const std::string& context, clients::ChatClient& client,
                                         clients::TokenUsage* usage = nullptr);

struct RankingMetrics {
    std::map<std::size_t, double> ndcg_at;
    std::map<std::size_t, double> recall_at;  ///< only k within the retrieval depth
    std::size_t input_tokens = 0;             ///< all prompts sent for the question
    std::size_t evidence_tokens = 0;          ///< evidence token_total
};

struct QuestionResult {
    std::string question_id;
    std::string mode;
    std::optional<RankingMetrics> metrics;
    std::vector<std::string> predicted;
    std::vector<std::string> evidence_ids;
    std::optional<std::string> error;
};

struct BenchmarkSummary {
    std::size_t questions = 0;
    std::size_t evaluated = 0;
    std::size_t errors = 0;
    std::map<std::size_t, double> mean_ndcg_at;
    std::map<std::size_t, double> mean_recall_at;
    std::size_t total_input_tokens = 0;
    std::size_t total_evidence_tokens = 0;
};

struct BenchmarkReport {
    nlohmann::json config;
    std::vector<QuestionResult> results;  ///< question id order
    BenchmarkSummary summary;
};

nlohmann::json to_json(const BenchmarkReport& r);
/// Means over evaluated questions, in question id order.
BenchmarkSummary summarize(const std::vector<QuestionResult>& results);

struct BenchmarkOptions {
    Gain gain = Gain::Linear;
    std::uint64_t seed = 0;  ///< oracle evidence order
    bool keep_details = true;
};

/// Retrieves evidence for every question, ranks its candidates with the
/// client and scores the ranking. Per-question failures are recorded in the
/// result and counted, not thrown. The retriever is needed for every mode.
BenchmarkReport run_benchmark(const std::vector<aggdb::AggregativeQuestion>& questions,
                              const probe::RetrievalConfig& cfg, const probe::Retriever& retriever,
                              const corpus::CorpusStore& store, clients::ChatClient& client,
                              const BenchmarkOptions& options = {});

struct QCOptions {
    std::size_t context_k = 100;  ///< supporting conversations shown per setting
    std::size_t trials = 10000;
    std::size_t k = 10;
    std::uint64_t seed = 0;
    Gain gain = Gain::Linear;
};

struct QCResult {
    std::string question_id;
    std::optional<QCDecision> decision;
    std::optional<std::string> error;
};

/// Ranks each question without context and with its supporting
/// conversations as raw and as summary context, then applies qc_filter.
std::vector<QCResult> run_qc(const std::vector<aggdb::AggregativeQuestion>& questions,
                             const corpus::CorpusStore& store, clients::ChatClient& client,
                             const QCOptions& options = {});

nlohmann::json to_json(const QCResult& r);

}  // namespace aqa::eval
