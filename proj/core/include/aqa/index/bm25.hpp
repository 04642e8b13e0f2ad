#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aqa/index/documents.hpp"

namespace aqa::index {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Lowercased word tokens with stopwords removed; used for documents and queries.
std::vector<std::string> bm25_terms(std::string_view text);

/// Inverted index with Robertson BM25 scoring:
///   idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
///   score(d, q) = sum over distinct query terms of
///                 idf(t) * tf (k1 + 1) / (tf + k1 (1 - b + b |d| / avgdl))
class Bm25Index {
public:
    /// Throws InvalidArgument on an empty document list or duplicate ids.
    Bm25Index(std::vector<IndexDocument> docs, const Bm25Params& params = {});

    const DocTable& table() const noexcept { return table_; }
    const Bm25Params& params() const noexcept { return params_; }
    double average_length() const noexcept { return avgdl_; }
    std::size_t document_frequency(std::string_view term) const;

    /// Score of one document (by table position); 0 when no term matches.
    double score(std::string_view query, std::size_t doc) const;

    /// Top k conversations among filter-passing documents that contain at
    /// least one query term; chunk scores are max-pooled per conversation.
    std::vector<ScoredDoc> search(std::string_view query, const MetadataFilter& filter, std::size_t k) const;

    /// Directory with meta.json, docs.jsonl and postings.jsonl.
    void save(const std::string& dir) const;
    static Bm25Index load(const std::string& dir);

private:
    Bm25Index() = default;
    void finish();
    double idf(std::size_t df) const;
    std::vector<std::uint32_t> query_term_ids(std::string_view query) const;

    Bm25Params params_;
    DocTable table_;
    std::vector<std::uint32_t> lengths_;
    double avgdl_ = 0.0;
    std::unordered_map<std::string, std::uint32_t> vocab_;
    std::vector<std::string> terms_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> postings_;  ///< (doc, tf) by doc
};

}  // namespace aqa::index
