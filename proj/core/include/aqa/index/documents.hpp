#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aqa/corpus/chunker.hpp"
#include "aqa/corpus/conversation.hpp"
#include "aqa/index/filter.hpp"

namespace aqa::index {

/// What a retrieval unit is made of: chunks of the raw transcript or the summary.
enum class TextGranularity { Raw, Summary };

TextGranularity parse_text_granularity(std::string_view name);
std::string_view granularity_name(TextGranularity g) noexcept;

/// One retrievable unit. Chunks point at their conversation through
/// parent_id; summaries are their own parent.
struct IndexDocument {
    std::string id;
    std::string parent_id;
    std::string text;
    std::size_t parent_tokens = 0;  ///< tokens the parent costs as evidence
    DocMeta meta;
};

nlohmann::json to_json(const IndexDocument& d);
IndexDocument document_from_json(const nlohmann::json& j);

/// Summary mode: one document per conversation (text falls back to the
/// transcript when there is no summary). Raw mode: one document per chunk.
std::vector<IndexDocument> make_documents(const corpus::CorpusStore& store, TextGranularity g,
                                          const corpus::ChunkParams& chunking = {});

/// Raw-mode documents from chunks produced earlier.
std::vector<IndexDocument> documents_from_chunks(const corpus::CorpusStore& store,
                                                 const std::vector<corpus::Chunk>& chunks);

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
    int source_query_index = 0;  ///< which generated query produced the score

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Score descending, then doc_id ascending.
bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) noexcept;

/// Documents plus the parent lookup shared by both index kinds.
class DocTable {
public:
    DocTable() = default;
    explicit DocTable(std::vector<IndexDocument> docs);

    std::size_t size() const noexcept { return docs_.size(); }
    const IndexDocument& doc(std::size_t i) const { return docs_[i]; }
    const std::vector<IndexDocument>& docs() const noexcept { return docs_; }
    std::size_t parent_count() const noexcept { return parents_.size(); }
    const std::vector<std::string>& parents() const noexcept { return parents_; }

    /// Tokens of a parent as evidence; throws NotFound.
    std::size_t parent_tokens(const std::string& parent_id) const;

    /// Max-pools per-document scores into their parents and returns the
    /// top k parents in ranks_before order. Scores of documents that fail
    /// the filter must not be passed in.
    std::vector<ScoredDoc> pool_top_k(const std::vector<std::pair<std::size_t, double>>& scored,
                                      std::size_t k) const;

    /// Indices of documents passing the filter.
    std::vector<std::size_t> passing(const MetadataFilter& filter) const;

private:
    std::vector<IndexDocument> docs_;
    std::vector<std::string> parents_;  ///< sorted, unique
    std::vector<std::size_t> parent_of_;
    std::unordered_map<std::string, std::size_t> parent_tokens_;
};

/// Top k by ranks_before without sorting everything.
void keep_top_k(std::vector<ScoredDoc>& docs, std::size_t k);

}  // namespace aqa::index
