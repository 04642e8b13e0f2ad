#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "aqa/corpus/conversation.hpp"
#include "aqa/corpus/minhash.hpp"
#include "aqa/time.hpp"

namespace aqa::corpus {

struct LshParams {
    std::size_t bands = 7;
    std::size_t rows = 3;
    double threshold = 0.8;  ///< verified shingle-Jaccard needed to merge a candidate pair
};

/// What dedup needs to know about one document.
struct DedupDocument {
    std::string id;
    Timestamp timestamp{};
    MinHashSignature signature;
    std::vector<std::uint64_t> shingles;  ///< sorted set, used to verify candidates
};

DedupDocument make_dedup_document(const Conversation& c, const MinHashParams& params);

struct DedupResult {
    /// Near-duplicate groups with at least two members; each sorted by
    /// (timestamp, id) so the survivor comes first. Groups sorted by survivor id.
    std::vector<std::vector<std::string>> clusters;
    /// Ids kept, in input order: singletons plus one survivor per cluster.
    std::vector<std::string> survivors;
    std::size_t candidate_pairs = 0;
    std::size_t verified_pairs = 0;
};

/// True when the two signatures share at least one band bucket.
bool lsh_candidate(const MinHashSignature& a, const MinHashSignature& b, std::size_t bands, std::size_t rows);

/// Bands the signatures, verifies candidate pairs against exact shingle
/// Jaccard and keeps the earliest conversation of every cluster (ties: smallest id).
/// Throws InvalidArgument on mixed or too-short signature lengths.
DedupResult lsh_dedup(const std::vector<DedupDocument>& docs, const LshParams& params = {});

/// Convenience: signature + dedup over a whole store; returns the surviving store.
CorpusStore dedup_store(const CorpusStore& store, const MinHashParams& mh, const LshParams& lsh,
                        DedupResult* result = nullptr);

}  // namespace aqa::corpus
