#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/clients/chat.hpp"
#include "aqa/clients/embedder.hpp"
#include "aqa/index/bm25.hpp"
#include "aqa/index/dense.hpp"
#include "aqa/index/documents.hpp"
#include "aqa/index/filter.hpp"

namespace aqa::probe {

inline constexpr std::size_t kDefaultMaxQueries = 8;

enum class Backend { Bm25, Dense };
Backend parse_backend(std::string_view name);
std::string_view backend_name(Backend b) noexcept;

/// Text search over either index kind. Dense search embeds the query text
/// with the embedder, which must outlive the retriever.
class Retriever {
public:
    static Retriever bm25(std::shared_ptr<const index::Bm25Index> idx);
    static Retriever dense(std::shared_ptr<const index::DenseIndex> idx, clients::Embedder& embedder);

    Backend backend() const noexcept { return backend_; }
    const index::DocTable& table() const noexcept;

    std::vector<index::ScoredDoc> search(const std::string& query, const index::MetadataFilter& filter,
                                         std::size_t k) const;
    /// Same as search() per query, embedding all queries in one batch.
    std::vector<std::vector<index::ScoredDoc>> search_many(const std::vector<std::string>& queries,
                                                           const index::MetadataFilter& filter,
                                                           std::size_t k) const;

private:
    Retriever() = default;
    Backend backend_ = Backend::Bm25;
    std::shared_ptr<const index::Bm25Index> bm25_;
    std::shared_ptr<const index::DenseIndex> dense_;
    clients::Embedder* embedder_ = nullptr;
};

/// Filters plus the broad queries generated for one question.
struct BroadQuerySet {
    index::MetadataFilter filters;
    std::vector<std::string> queries;
    std::string prompt_id = "probe_queries";
    std::vector<std::string> dropped_filters;  ///< model clauses that failed validation

    friend bool operator==(const BroadQuerySet&, const BroadQuerySet&) = default;
};

nlohmann::json to_json(const BroadQuerySet& b);
BroadQuerySet broad_query_set_from_json(const nlohmann::json& j);

/// Asks the client for filters and queries, keeps at most max_n queries.
/// Throws InvalidArgument on an empty question or max_n == 0, ParseError on
/// an unusable response or when no query remains.
BroadQuerySet generate_broad_queries(const std::string& question, clients::ChatClient& client,
                                     std::size_t max_n = kDefaultMaxQueries);

struct EvidenceSet {
    std::vector<index::ScoredDoc> docs;  ///< conversations, ranks_before order
    std::size_t k = 0;
    std::size_t token_total = 0;

    std::vector<std::string> ids() const;
    friend bool operator==(const EvidenceSet&, const EvidenceSet&) = default;
};

nlohmann::json to_json(const EvidenceSet& e);
EvidenceSet evidence_from_json(const nlohmann::json& j);

/// Wraps ranked conversations, truncating to k and summing their tokens.
EvidenceSet make_evidence(std::vector<index::ScoredDoc> docs, std::size_t k, const index::DocTable& table);

/// One filtered retrieval per query, merged per conversation by the maximum
/// score (the earliest query wins ties for source_query_index), top final_k.
/// per_query_k == 0 means final_k. Throws InvalidArgument when final_k == 0
/// or there are no queries.
EvidenceSet fan_out_retrieve(const Retriever& r, const BroadQuerySet& bqs, std::size_t per_query_k,
                             std::size_t final_k);

/// The pure merge step on per-query result lists.
std::vector<index::ScoredDoc> max_pool_merge(const std::vector<std::vector<index::ScoredDoc>>& per_query);

/// The question as the only query, no filters.
EvidenceSet rag_retrieve(const Retriever& r, const std::string& question, std::size_t k);

enum class AblationMode { FilterOnly, QuestionAndFilter };
AblationMode parse_ablation_mode(std::string_view name);
std::string_view ablation_name(AblationMode m) noexcept;

/// FilterOnly: every filter-passing conversation, newest first (score is the
/// Unix time). QuestionAndFilter: the question as the only query under the
/// generated filters.
EvidenceSet ablate(AblationMode mode, const Retriever& r, const std::string& question, const BroadQuerySet& bqs,
                   std::size_t k);

/// Supporting conversations in a seeded random order, truncated to k, score 1.
/// Ids missing from the table are skipped.
EvidenceSet oracle_evidence(const std::vector<std::string>& supporting_ids, const index::DocTable& table,
                            std::size_t k, std::uint64_t seed);

enum class RetrievalMode { Rag, Probe, FilterOnly, QuestionAndFilter, Oracle };
RetrievalMode parse_retrieval_mode(std::string_view name);
std::string_view retrieval_mode_name(RetrievalMode m) noexcept;

struct RetrievalConfig {
    RetrievalMode mode = RetrievalMode::Probe;
    Backend backend = Backend::Dense;
    index::TextGranularity granularity = index::TextGranularity::Summary;
    std::size_t per_query_k = 0;  ///< 0: same as final_k
    std::size_t final_k = 100;
    std::size_t max_n = kDefaultMaxQueries;

    /// Throws InvalidArgument on final_k == 0 or max_n == 0.
    void validate() const;
    friend bool operator==(const RetrievalConfig&, const RetrievalConfig&) = default;
};

nlohmann::json to_json(const RetrievalConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
RetrievalConfig retrieval_config_from_json(const nlohmann::json& j);

/// Evidence for one question under a configuration. Oracle mode needs the
/// supporting ids; generated queries are written to `bqs_out` when given.
EvidenceSet retrieve(const RetrievalConfig& cfg, const Retriever& r, const std::string& question,
                     clients::ChatClient& client, const std::vector<std::string>& supporting_ids = {},
                     std::uint64_t seed = 0, BroadQuerySet* bqs_out = nullptr);

}  // namespace aqa::probe
