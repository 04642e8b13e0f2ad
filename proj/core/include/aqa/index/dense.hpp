#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aqa/index/documents.hpp"

namespace aqa::index {

inline constexpr std::size_t kDefaultEmbeddingDim = 3072;

using EmbeddingVector = std::vector<double>;

/// Scales to unit Euclidean norm. Throws InvalidArgument on zero, empty or
/// non-finite input.
EmbeddingVector normalized(EmbeddingVector v);

double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Exact cosine search over unit vectors.
class DenseIndex {
public:
    /// vectors[i] belongs to docs[i]; vectors are normalized on the way in.
    /// Throws InvalidArgument on count or dimension mismatch.
    DenseIndex(std::vector<IndexDocument> docs, const std::vector<EmbeddingVector>& vectors);

    const DocTable& table() const noexcept { return table_; }
    std::size_t dim() const noexcept { return dim_; }
    std::span<const double> vector(std::size_t doc) const;

    /// Cosine of the query with every filter-passing document, max-pooled
    /// per conversation, top k. The query must be unit norm.
    std::vector<ScoredDoc> search(std::span<const double> query, const MetadataFilter& filter, std::size_t k) const;

    /// Directory with meta.json, docs.jsonl and vectors.bin (little-endian
    /// float64, row-major, one row per docs.jsonl line).
    void save(const std::string& dir) const;
    static DenseIndex load(const std::string& dir);

private:
    DenseIndex() = default;

    DocTable table_;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// Embedding input file: one {"id": ..., "vector": [...]} record per line.
std::vector<std::pair<std::string, EmbeddingVector>> read_embeddings(const std::string& path);
void write_embeddings(const std::string& path, const std::vector<std::pair<std::string, EmbeddingVector>>& rows);

}  // namespace aqa::index
